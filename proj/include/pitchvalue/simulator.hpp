#pragma once

#include "pitchvalue/geometry.hpp"
#include "pitchvalue/tracking.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pitchvalue {

struct PlantedWindow {
    double start = 0.0;
    double duration = 20.0;

    double end() const { return start + duration; }
};

// A dead-ball interval: the ball goes dead at `t` and play restarts with
// `restart` after `duration` seconds, taken by `team` (drawn at random when
// unset).
struct ScheduledStoppage {
    double t = 0.0;
    EventKind restart = EventKind::ThrowIn;
    double duration = 10.0;
    std::optional<Team> team;

    double restart_time() const { return t + duration; }
};

// Conversion keys are restart kind names ("penalty_kick", ...) plus
// "in_play" for planted intense windows.
inline constexpr const char* kInPlayKey = "in_play";

struct SimulatorConfig {
    std::uint64_t seed = 1;
    double frame_rate = 25.0;
    double half_length = 2700.0;
    int half_id = 1;
    std::string match_id = "match_0001";
    PitchSpec pitch;
    AttackTable attack;
    std::vector<PlantedWindow> windows;
    std::map<std::string, double> conversion;
    std::vector<ScheduledStoppage> stoppages;

    int block_transitions = 36;     // rapid rigid shifts of both formations in open play
    double restart_settle = 45.0;   // set-piece shape held after each restart
    double kickoff_delay = 30.0;    // goal to kickoff

    static constexpr double kGoalDelayMin = 5.0;
    static constexpr double kGoalDelayMax = 20.0;

    // Time after a trigger during which nothing else may be scheduled.
    double reserved_after_trigger() const {
        return kGoalDelayMax + kickoff_delay + restart_settle;
    }
    double probability(const std::string& key) const;
    void validate() const;
};

std::map<std::string, double> default_conversion_table();

struct GoalRecord {
    double t = 0.0;
    Team team = Team::A;
};

struct TriggerRecord {
    double t = 0.0;
    std::string kind;  // restart kind name or "in_play"
    Team team = Team::A;
    double probability = 0.0;
};

struct GroundTruth {
    std::vector<PlantedWindow> windows;
    std::vector<GoalRecord> goals;
    std::vector<TriggerRecord> triggers;
};

struct SimulatedHalf {
    FrameSeries frames;
    std::vector<RawEvent> events;
    GroundTruth truth;
};

// Fails with an "internal" error if the planted windows do not reach the
// contrast below.
SimulatedHalf simulate_half(const SimulatorConfig& cfg);

// Mean ellipse area inside planted windows over the mean outside them, on a
// 1 Hz grid with goalkeepers excluded. NaN if either side is empty.
inline constexpr double kPlantedContrastMax = 0.5;
double planted_contrast(const FrameSeries& frames, const std::vector<PlantedWindow>& windows);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& path);

// Season generation: per-half schedules are drawn from the template.
struct SeasonTemplate {
    SimulatorConfig base;  // seed acts as the master seed
    int windows_per_half = 10;
    double window_duration = 20.0;
    int stoppages_per_half = 10;
    // Relative frequency of each restart kind among scheduled stoppages.
    std::map<EventKind, double> restart_mix{
        {EventKind::ThrowIn, 4.0},          {EventKind::FreeKickIndirect, 2.0},
        {EventKind::FreeKickDirect, 2.0},   {EventKind::CornerKick, 2.0},
        {EventKind::PenaltyKick, 2.0},
    };

    // The worst-case draw (every stoppage at its longest) must fit in a half.
    void validate() const;
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// Concrete config for one half: random non-overlapping windows and stoppages.
SimulatorConfig plan_half(const SeasonTemplate& tmpl, std::uint64_t seed, int half_id,
                          const std::string& match_id);

// Match index i (0-based) is "match_{i+1:04d}"; each half of a season uses
// its own seed derived from the master seed.
std::string match_id_for(int index);
std::uint64_t season_half_seed(const SeasonTemplate& tmpl, int match_index, int half_id);
SimulatedHalf simulate_season_half(const SeasonTemplate& tmpl, int match_index, int half_id);

struct ManifestEntry {
    std::string match_id;
    std::uint64_t seed_half1 = 0;
    std::uint64_t seed_half2 = 0;
    std::map<std::string, std::string> checksums;  // file name -> hex digest
};

struct Manifest {
    std::uint64_t master_seed = 0;
    std::vector<ManifestEntry> matches;
    std::string checksum;  // digest over all per-file digests
};

// Writes <dir>/<match_id>/half{1,2}_{frames,events,truth}.csv plus
// <dir>/manifest.json.
Manifest simulate_season(const SeasonTemplate& tmpl, int n_matches,
                         const std::filesystem::path& dir);

std::string half_file(int half_id, const char* what);  // "half1_frames.csv"
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace pitchvalue
