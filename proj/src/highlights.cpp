#include "pitchvalue/highlights.hpp"

#include "pitchvalue/error.hpp"
#include "pitchvalue/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace pitchvalue {

std::size_t windows_found(const std::vector<IntensePeriod>& ranked, const std::vector<PlantedWindow>& windows,
                          int k) {
    const std::size_t top =
        k <= 0 ? ranked.size() : std::min(ranked.size(), static_cast<std::size_t>(k));
    std::size_t found = 0;
    for (const auto& w : windows) {
        const bool hit = std::any_of(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                                     [&](const IntensePeriod& p) { return p.peak_t >= w.start && p.peak_t <= w.end(); });
        if (hit) ++found;
    }
    return found;
}

HalfHighlights half_highlights(const FrameSeries& frames, const DetectorConfig& cfg,
                               std::optional<std::vector<PlantedWindow>> truth) {
    HalfHighlights h;
    h.match_id = frames.match_id;
    h.half_id = frames.half_id;
    h.covariance = rank_by_score(detect_intense_periods(frames, cfg));
    h.speed = rank_by_score(speed_baseline_periods(frames, cfg));
    h.truth = std::move(truth);
    return h;
}

std::vector<RecallRow> recall_table(const std::vector<HalfHighlights>& halves, const std::vector<int>& cutoffs) {
    std::vector<RecallRow> rows;
    for (int k : cutoffs) {
        RecallRow row;
        row.k = k;
        std::size_t cov = 0, speed = 0;
        for (const auto& h : halves) {
            if (!h.truth) continue;
            row.windows += h.truth->size();
            cov += windows_found(h.covariance, *h.truth, k);
            speed += windows_found(h.speed, *h.truth, k);
        }
        if (row.windows == 0) throw Error("precondition", "no planted windows to score against");
        row.covariance = static_cast<double>(cov) / static_cast<double>(row.windows);
        row.speed = static_cast<double>(speed) / static_cast<double>(row.windows);
        rows.push_back(row);
    }
    return rows;
}

void write_recall_table(std::ostream& out, const std::vector<RecallRow>& rows) {
    out << "k,windows,covariance_recall,speed_recall\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.3f,%.3f\n", r.k, r.windows, r.covariance, r.speed);
        out << buf;
    }
}

HighlightIndex build_highlight_index(const std::filesystem::path& root, const DetectorConfig& cfg,
                                     const PitchSpec& pitch, const std::optional<std::string>& only_match) {
    HighlightIndex index;
    for (const auto& dir : match_dirs(root)) {
        const std::string id = dir.filename().string();
        if (only_match && *only_match != id) continue;
        for (int half = 1; half <= 2; ++half) {
            const auto frames_path = dir / half_file(half, "frames");
            if (!std::filesystem::exists(frames_path)) continue;
            auto parsed = parse_frames(frames_path, pitch);
            parsed.series.match_id = id;
            parsed.series.half_id = half;
            std::optional<std::vector<PlantedWindow>> truth;
            const auto truth_path = dir / half_file(half, "truth");
            if (std::filesystem::exists(truth_path)) truth = read_ground_truth(truth_path).windows;
            index[id].push_back(half_highlights(parsed.series, cfg, std::move(truth)));
        }
    }
    if (only_match && !index.count(*only_match)) throw Error("not_found", "unknown match " + *only_match);
    return index;
}

}  // namespace pitchvalue
