#pragma once

#include "pitchvalue/geometry.hpp"
#include "pitchvalue/intensity.hpp"
#include "pitchvalue/tracking.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pitchvalue {

// Event types as seen from the analyzed team. Restarts are split by who
// takes them, so an opponent's penalty is a different state from our own.
enum class EventType : int {
    InPlay,
    Kickoff,
    ThrowIn,
    FreeKickDirect,
    FreeKickIndirect,
    CornerKick,
    PenaltyKick,
    OppKickoff,
    OppThrowIn,
    OppFreeKickDirect,
    OppFreeKickIndirect,
    OppCornerKick,
    OppPenaltyKick,
};
inline constexpr int kEventTypeCount = 13;

const std::array<EventType, kEventTypeCount>& all_event_types();

// Short codes: IN, KO, TI, FK, IFK, CK, PK, and KO_OPP ... PK_OPP.
std::string_view event_type_code(EventType e);
std::string_view event_type_description(EventType e);
// Case-insensitive; also accepts restart kind names ("penalty_kick",
// "penalty-kick") for the analyzed team's own restarts.
std::optional<EventType> parse_event_type(std::string_view s);
// Restart kind to event type; nullopt for kinds that are not restarts.
std::optional<EventType> restart_event_type(EventKind kind, bool own);

enum class SignificantKind { InPlay, Stoppage };

struct SignificantEvent {
    SignificantKind kind = SignificantKind::InPlay;
    EventType type = EventType::InPlay;
    double t = 0.0;
    Position location;          // in the analyzed team's attack frame
    std::optional<Team> team;   // restart taker; empty for in-play events
    int own_score = 0;
    int opp_score = 0;
    int reward = 0;
};

struct ExtractionConfig {
    double reset_threshold = 5.0;  // seconds of dead ball before a restart counts
    DetectorConfig detector;

    void validate() const;
};

// Who is being analyzed and how to map pitch coordinates into their frame.
struct Perspective {
    Team analyzed = Team::A;
    int half_id = 1;
    AttackTable attack;
    PitchSpec pitch;

    Position normalize(Position p) const;
};

struct Goal {
    double t = 0.0;
    Team team = Team::A;
};

struct DeadBall {
    double start = 0.0;
    double end = 0.0;  // restart time
};

// One in-play event per period at period.start, located at the ball.
std::vector<SignificantEvent> extract_inplay_events(const std::vector<IntensePeriod>& periods,
                                                    const FrameSeries& frames,
                                                    const Perspective& view);

// Restarts that follow a dead ball of at least cfg.reset_threshold seconds.
// The ball is dead from a foul, out-of-bounds or goal until the next restart;
// the opening kickoff and any kickoff after a goal always qualify. Restarts
// with no taker are skipped.
std::vector<SignificantEvent> extract_stoppage_events(const std::vector<RawEvent>& events,
                                                      const ExtractionConfig& cfg,
                                                      const Perspective& view);

std::vector<DeadBall> dead_ball_intervals(const std::vector<RawEvent>& events);
std::vector<Goal> goals_from_events(const std::vector<RawEvent>& events);

// Drops in-play events whose time falls inside a dead ball [start, end).
std::vector<SignificantEvent> drop_dead_ball_events(std::vector<SignificantEvent> inplay,
                                                    const std::vector<DeadBall>& dead);

struct MergeResult {
    std::vector<SignificantEvent> events;
    std::vector<std::string> diagnostics;
};

// Time-ordered merge. Each goal credits the last event strictly before it
// (+1 for the analyzed team, -1 otherwise). An in-play event at the same time
// as a stoppage event is dropped so times stay strictly increasing.
MergeResult merge_and_attach_rewards(const std::vector<SignificantEvent>& inplay,
                                     const std::vector<SignificantEvent>& stoppage,
                                     const std::vector<Goal>& goals, Team analyzed);

// The whole per-half pipeline for one analyzed team.
MergeResult extract_half(const FrameSeries& frames, const std::vector<RawEvent>& events,
                         const ExtractionConfig& cfg, const Perspective& view);

void write_significant_events(std::ostream& out, const std::vector<SignificantEvent>& events);
void write_significant_events(const std::filesystem::path& path,
                              const std::vector<SignificantEvent>& events);
std::vector<SignificantEvent> read_significant_events(std::istream& in);
std::vector<SignificantEvent> read_significant_events(const std::filesystem::path& path);

}  // namespace pitchvalue
