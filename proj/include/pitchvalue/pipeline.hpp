#pragma once

#include "pitchvalue/chain.hpp"
#include "pitchvalue/events.hpp"
#include "pitchvalue/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pitchvalue {

// Both perspectives of one half: team A (home) then team B (away). A side
// with no significant events yields no episode.
std::vector<Episode> half_episodes(const FrameSeries& frames, const std::vector<RawEvent>& events,
                                   const ExtractionConfig& cfg, const AttackTable& attack,
                                   const PitchSpec& pitch, double half_length,
                                   std::vector<std::string>* diagnostics = nullptr);

// In-memory equivalent of simulating a season and extracting every half.
std::vector<Episode> simulated_episodes(const SeasonTemplate& tmpl, int n_matches, const ExtractionConfig& cfg,
                                        std::vector<std::string>* diagnostics = nullptr);

// Match directories under a dataset root, sorted by name.
std::vector<std::filesystem::path> match_dirs(const std::filesystem::path& root);

// Significant-event file name for a half and analyzed team.
std::string significant_file(int half_id, Team team);

// Episodes from the significant-event files that `extract` writes.
std::vector<Episode> load_extracted_episodes(const std::filesystem::path& root, double half_length);

}  // namespace pitchvalue
