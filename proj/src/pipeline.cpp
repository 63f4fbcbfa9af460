#include "pitchvalue/pipeline.hpp"

#include "pitchvalue/error.hpp"

#include <algorithm>

namespace pitchvalue {

std::vector<Episode> half_episodes(const FrameSeries& frames, const std::vector<RawEvent>& events,
                                   const ExtractionConfig& cfg, const AttackTable& attack,
                                   const PitchSpec& pitch, double half_length,
                                   std::vector<std::string>* diagnostics) {
    std::vector<Episode> out;
    for (Team team : {Team::A, Team::B}) {
        Perspective view{team, frames.half_id, attack, pitch};
        auto merged = extract_half(frames, events, cfg, view);
        if (diagnostics) {
            for (auto& d : merged.diagnostics)
                diagnostics->push_back(frames.match_id + " half " + std::to_string(frames.half_id) + " " +
                                       std::string(team_name(team)) + ": " + d);
        }
        if (merged.events.empty()) continue;
        out.push_back(build_episode(merged.events, half_length, side_of(team),
                                    frames.match_id + "/h" + std::to_string(frames.half_id) + "/" +
                                        std::string(team_name(team))));
    }
    return out;
}

std::vector<Episode> simulated_episodes(const SeasonTemplate& tmpl, int n_matches, const ExtractionConfig& cfg,
                                        std::vector<std::string>* diagnostics) {
    if (n_matches < 1) throw Error("precondition", "need at least one match");
    std::vector<Episode> out;
    for (int m = 0; m < n_matches; ++m) {
        for (int half = 1; half <= 2; ++half) {
            const SimulatedHalf sim = simulate_season_half(tmpl, m, half);
            auto eps = half_episodes(sim.frames, sim.events, cfg, tmpl.base.attack, tmpl.base.pitch,
                                     tmpl.base.half_length, diagnostics);
            for (auto& e : eps) out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<std::filesystem::path> match_dirs(const std::filesystem::path& root) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) throw Error("io", "not a directory: " + root.string());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string significant_file(int half_id, Team team) {
    return "half" + std::to_string(half_id) + "_significant_" + std::string(team_name(team)) + ".csv";
}

std::vector<Episode> load_extracted_episodes(const std::filesystem::path& root, double half_length) {
    std::vector<Episode> out;
    for (const auto& dir : match_dirs(root)) {
        for (int half = 1; half <= 2; ++half) {
            for (Team team : {Team::A, Team::B}) {
                const auto path = dir / significant_file(half, team);
                if (!std::filesystem::exists(path)) continue;
                auto events = read_significant_events(path);
                if (events.empty()) continue;
                out.push_back(build_episode(events, half_length, side_of(team),
                                            dir.filename().string() + "/h" + std::to_string(half) + "/" +
                                                std::string(team_name(team))));
            }
        }
    }
    if (out.empty()) throw Error("io", "no extracted significant-event files under " + root.string());
    return out;
}

}  // namespace pitchvalue
