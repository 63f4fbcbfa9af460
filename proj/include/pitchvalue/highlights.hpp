#pragma once

#include "pitchvalue/intensity.hpp"
#include "pitchvalue/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pitchvalue {

// A window counts as found when the peak of one of the top-k periods lies
// inside it (inclusive bounds). k <= 0 means every period.
std::size_t windows_found(const std::vector<IntensePeriod>& ranked, const std::vector<PlantedWindow>& windows,
                          int k);

struct HalfHighlights {
    std::string match_id;
    int half_id = 1;
    std::vector<IntensePeriod> covariance;  // ranked by score
    std::vector<IntensePeriod> speed;       // ranked by score
    std::optional<std::vector<PlantedWindow>> truth;
};

HalfHighlights half_highlights(const FrameSeries& frames, const DetectorConfig& cfg,
                               std::optional<std::vector<PlantedWindow>> truth = std::nullopt);

struct RecallRow {
    int k = 0;
    std::size_t windows = 0;
    double covariance = 0.0;
    double speed = 0.0;
};

// Pooled over halves: found windows within each half's own top-k, divided by
// all planted windows. Halves without ground truth are skipped.
std::vector<RecallRow> recall_table(const std::vector<HalfHighlights>& halves, const std::vector<int>& cutoffs);

void write_recall_table(std::ostream& out, const std::vector<RecallRow>& rows);

// Highlights of every half found under a dataset root, keyed by match id.
using HighlightIndex = std::map<std::string, std::vector<HalfHighlights>>;

HighlightIndex build_highlight_index(const std::filesystem::path& root, const DetectorConfig& cfg,
                                     const PitchSpec& pitch, const std::optional<std::string>& only_match = {});

}  // namespace pitchvalue
