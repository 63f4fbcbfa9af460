#include "doctest.h"
#include "support.hpp"

#include "pitchvalue/error.hpp"
#include "pitchvalue/intensity.hpp"
#include "pitchvalue/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace pitchvalue;

namespace {

SimulatorConfig short_half(std::uint64_t seed) {
    SimulatorConfig cfg;
    cfg.seed = seed;
    cfg.half_length = 900.0;
    cfg.conversion = default_conversion_table();
    return cfg;
}

std::string frames_text(const SimulatedHalf& h) {
    std::ostringstream out;
    write_frames(out, h.frames);
    return out.str();
}

double area_cv(const FrameSeries& s) {
    const auto series = intensity_series(s, DetectorConfig{});
    double mean = 0.0, sq = 0.0;
    for (double a : series.area) mean += a;
    mean /= static_cast<double>(series.area.size());
    for (double a : series.area) sq += (a - mean) * (a - mean);
    return std::sqrt(sq / static_cast<double>(series.area.size())) / mean;
}

}  // namespace

TEST_CASE("simulate_half: identical seeds give byte-identical output") {
    SimulatorConfig cfg = short_half(9);
    cfg.windows = {{200, 20}, {500, 20}};
    const auto a = simulate_half(cfg);
    const auto b = simulate_half(cfg);
    CHECK(frames_text(a) == frames_text(b));
    std::ostringstream ea, eb;
    write_events(ea, a.events);
    write_events(eb, b.events);
    CHECK(ea.str() == eb.str());

    cfg.seed = 10;
    CHECK(frames_text(simulate_half(cfg)) != frames_text(a));
}

TEST_CASE("simulate_half: planted windows raise the variability of S") {
    SimulatorConfig calm = short_half(3);
    calm.conversion.clear();
    SimulatorConfig planted = calm;
    planted.windows = {{150, 20}, {400, 20}, {650, 20}};
    CHECK(area_cv(simulate_half(calm).frames) < area_cv(simulate_half(planted).frames));
}

TEST_CASE("simulate_half: planted contrast holds and is reported") {
    SimulatorConfig cfg = short_half(4);
    cfg.windows = {{150, 20}, {400, 20}, {650, 20}};
    const auto h = simulate_half(cfg);
    const double ratio = planted_contrast(h.frames, cfg.windows);
    CHECK(ratio < kPlantedContrastMax);
    CHECK(std::isnan(planted_contrast(h.frames, {})));
}

TEST_CASE("simulate_half: a certain penalty produces exactly one goal") {
    SimulatorConfig cfg = short_half(5);
    cfg.conversion = {{"penalty_kick", 1.0}};
    cfg.stoppages = {{300.0, EventKind::PenaltyKick, 30.0, Team::A}};
    const auto h = simulate_half(cfg);
    REQUIRE(h.truth.goals.size() == 1);
    CHECK(h.truth.goals[0].team == Team::A);
    CHECK(h.truth.goals[0].t >= 330.0 + SimulatorConfig::kGoalDelayMin);
    CHECK(h.truth.goals[0].t <= 330.0 + SimulatorConfig::kGoalDelayMax);
    const auto goals = std::count_if(h.events.begin(), h.events.end(),
                                     [](const RawEvent& e) { return e.kind == EventKind::Goal; });
    CHECK(goals == 1);
}

TEST_CASE("simulate_half: ground-truth goals match goal events") {
    SimulatorConfig cfg = short_half(6);
    cfg.conversion = {{"in_play", 0.5}, {"corner_kick", 0.5}};
    cfg.windows = {{100, 20}, {500, 20}};
    cfg.stoppages = {{300.0, EventKind::CornerKick, 20.0, std::nullopt},
                     {700.0, EventKind::CornerKick, 20.0, std::nullopt}};
    const auto h = simulate_half(cfg);
    std::vector<std::pair<double, Team>> logged, truth;
    for (const auto& e : h.events)
        if (e.kind == EventKind::Goal) logged.push_back({e.t, *e.team});
    for (const auto& g : h.truth.goals) truth.push_back({g.t, g.team});
    CHECK(logged == truth);
    CHECK(h.truth.triggers.size() == 4);
    CHECK(std::is_sorted(h.events.begin(), h.events.end(),
                         [](const RawEvent& a, const RawEvent& b) { return a.t < b.t; }));
}

TEST_CASE("simulate_half: invalid schedules are rejected") {
    SimulatorConfig overlap = short_half(1);
    overlap.windows = {{200, 20}, {210, 20}};
    CHECK_THROWS_AS(simulate_half(overlap), Error);

    SimulatorConfig outside = short_half(1);
    outside.windows = {{890, 20}};
    CHECK_THROWS_AS(simulate_half(outside), Error);

    SimulatorConfig prob = short_half(1);
    prob.conversion["penalty_kick"] = 1.5;
    CHECK_THROWS_AS(simulate_half(prob), Error);

    SimulatorConfig rate = short_half(1);
    rate.frame_rate = 50;
    CHECK_THROWS_AS(simulate_half(rate), Error);
}

TEST_CASE("season template: the worst-case schedule must fit in a half") {
    SeasonTemplate tmpl;
    CHECK_NOTHROW(tmpl.validate());
    tmpl.stoppages_per_half = 40;
    CHECK_THROWS_AS(tmpl.validate(), Error);
}

TEST_CASE("simulate_season: layout, manifest determinism and errors") {
    SeasonTemplate tmpl;
    tmpl.base.seed = 77;
    tmpl.base.half_length = 1500.0;
    tmpl.windows_per_half = 3;
    tmpl.stoppages_per_half = 3;

    testing::TempDir a("season_a"), b("season_b");
    const Manifest ma = simulate_season(tmpl, 1, a.path());
    const Manifest mb = simulate_season(tmpl, 1, b.path());
    CHECK(ma.checksum == mb.checksum);
    REQUIRE(ma.matches.size() == 1);
    CHECK(ma.matches[0].match_id == "match_0001");
    for (int half = 1; half <= 2; ++half)
        for (const char* what : {"frames", "events", "truth"})
            CHECK(std::filesystem::exists(a.path() / "match_0001" / half_file(half, what)));
    CHECK(std::filesystem::exists(a.path() / "manifest.json"));
    CHECK(ma.matches[0].seed_half1 != ma.matches[0].seed_half2);

    const auto truth = read_ground_truth(a.path() / "match_0001" / half_file(1, "truth"));
    CHECK(truth.windows.size() == 3);

    CHECK_THROWS_AS(simulate_season(tmpl, 0, a.path()), Error);

    std::ofstream(a.path() / "blocker") << "x";
    CHECK_THROWS_AS(simulate_season(tmpl, 1, a.path() / "blocker" / "sub"), Error);
}
