#pragma once

#include "pitchvalue/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pitchvalue {

struct PlayerSample {
    Team team = Team::A;
    int player_id = 0;
    Position pos;
    bool is_goalkeeper = false;
};

struct Frame {
    double t = 0.0;  // seconds from half start
    std::vector<PlayerSample> players;
    Position ball;
};

struct FrameSeries {
    int half_id = 1;
    std::string match_id;
    double frame_rate = 25.0;
    std::vector<Frame> frames;

    double start_time() const { return frames.empty() ? 0.0 : frames.front().t; }
    double end_time() const { return frames.empty() ? 0.0 : frames.back().t; }
};

inline constexpr double kMinFrameRate = 15.0;
inline constexpr double kMaxFrameRate = 30.0;
inline constexpr int kMinPlayersPerTeam = 4;

enum class EventKind {
    Kickoff,
    Pass,
    Foul,
    ThrowIn,
    FreeKickDirect,
    FreeKickIndirect,
    CornerKick,
    PenaltyKick,
    Goal,
    OutOfBounds,
    StoppageEnd,
    HalfEnd,
    Other,
};

std::string_view event_kind_name(EventKind k);
// Accepts '_' or '-' separators. Unknown names map to Other.
EventKind parse_event_kind(std::string_view s);
bool is_restart(EventKind k);

struct RawEvent {
    double t = 0.0;
    EventKind kind = EventKind::Other;
    std::string label;  // kind as written in the log
    std::optional<Team> team;
    Position location;
};

struct ParsedFrames {
    FrameSeries series;
    std::size_t malformed_rows = 0;
    std::size_t rejected_frames = 0;
};

struct ParsedEvents {
    std::vector<RawEvent> events;
    std::size_t malformed_rows = 0;
};

ParsedFrames parse_frames(std::istream& in, const PitchSpec& pitch);
ParsedFrames parse_frames(const std::filesystem::path& path, const PitchSpec& pitch);

ParsedEvents parse_events(std::istream& in);
ParsedEvents parse_events(const std::filesystem::path& path);

// Canonical writers: three decimals for times and coordinates, players in
// stored order followed by the ball row.
void write_frames(std::ostream& out, const FrameSeries& series);
void write_frames(const std::filesystem::path& path, const FrameSeries& series);
void write_events(std::ostream& out, const std::vector<RawEvent>& events);
void write_events(const std::filesystem::path& path, const std::vector<RawEvent>& events);

// Index of the frame closest in time to t; frames must be non-empty.
std::size_t nearest_frame(const FrameSeries& series, double t);

}  // namespace pitchvalue
