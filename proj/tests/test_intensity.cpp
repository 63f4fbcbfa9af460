#include "doctest.h"
#include "support.hpp"

#include "pitchvalue/error.hpp"
#include "pitchvalue/intensity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace pitchvalue;
using testing::frame_at;

namespace {

constexpr double kPi = std::numbers::pi;

// 20 outfield players on a 5 x 4 lattice, moved by `motion(i, t)`.
FrameSeries lattice_series(double seconds, const std::function<Position(int, double)>& motion, double rate = 25.0) {
    FrameSeries s;
    s.frame_rate = rate;
    s.match_id = "fixture";
    const int n = static_cast<int>(seconds * rate);
    for (int k = 0; k <= n; ++k) {
        const double t = k / rate;
        std::vector<Position> ps;
        for (int i = 0; i < 20; ++i) {
            const Position base{20.0 + 15.0 * (i % 5), 10.0 + 15.0 * (i / 5)};
            const Position d = motion(i, t);
            ps.push_back({base.x + d.x, base.y + d.y});
        }
        s.frames.push_back(frame_at(t, ps));
    }
    return s;
}

FrameSeries transform(FrameSeries s, double scale, Position offset) {
    for (auto& f : s.frames)
        for (auto& p : f.players) p.pos = {p.pos.x * scale + offset.x, p.pos.y * scale + offset.y};
    return s;
}

// Players breathe in and out so S changes smoothly over time.
Position breathing(int i, double t) {
    const double a = 0.15 * std::sin(0.07 * t) + 0.1 * std::sin(0.23 * t + 1.0);
    const double cx = 20.0 + 15.0 * (i % 5) - 50.0, cy = 10.0 + 15.0 * (i / 5) - 32.5;
    return {a * cx, a * cy};
}

double brute_window_mean(const std::vector<double>& f, std::size_t k, std::size_t width, ConvWindow dir) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const bool in = dir == ConvWindow::Forward ? (j >= k && j < k + width) : (j <= k && j + width > k);
        if (in) {
            sum += f[j];
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

bool brute_is_peak(const std::vector<double>& v, const std::vector<double>& t, std::size_t k, double N) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i == k || std::abs(t[i] - t[k]) > N) continue;
        if (!(v[k] > v[i])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("covariance_at: hand-computed fixtures") {
    const DetectorConfig cfg;
    const Cov2 square = covariance_at(frame_at(0, {{0, 0}, {2, 0}, {0, 2}, {2, 2}}), cfg);
    CHECK(square.xx == 1.0);
    CHECK(square.xy == 0.0);
    CHECK(square.yx == 0.0);
    CHECK(square.yy == 1.0);

    const Cov2 point = covariance_at(frame_at(0, {{7, 3}, {7, 3}, {7, 3}, {7, 3}}), cfg);
    CHECK(point.xx == 0.0);
    CHECK(point.xy == 0.0);
    CHECK(point.yy == 0.0);

    const Cov2 line = covariance_at(frame_at(0, {{0, 0}, {2, 2}}), cfg);
    CHECK(line.xx == 1.0);
    CHECK(line.xy == 1.0);
    CHECK(line.yx == 1.0);
    CHECK(line.yy == 1.0);
    CHECK(ellipse_area(line) == 0.0);
}

TEST_CASE("covariance_at: goalkeepers and team filters") {
    Frame f = frame_at(0, {{0, 0}, {2, 0}, {0, 2}, {2, 2}});
    f.players.push_back({Team::A, 99, {100, 60}, true});
    DetectorConfig cfg;
    CHECK(covariance_at(f, cfg).xx == 1.0);
    cfg.include_goalkeepers = true;
    CHECK(covariance_at(f, cfg).xx > 1.0);

    DetectorConfig only_a;
    only_a.teams = DistributionTeams::AOnly;  // players (0,0) and (2,0)
    const Cov2 a = covariance_at(f, only_a);
    CHECK(a.xx == 1.0);
    CHECK(a.yy == 0.0);
}

TEST_CASE("covariance_at: fewer than two included players") {
    CHECK_THROWS_AS(covariance_at(frame_at(0, {{1, 1}}), DetectorConfig{}), Error);
}

TEST_CASE("ellipse_area: worked values") {
    CHECK(ellipse_area({1, 0, 0, 1}) == doctest::Approx(kPi));
    CHECK(ellipse_area({4, 0, 0, 1}) == doctest::Approx(4 * kPi));
    CHECK(ellipse_area({1, 1, 1, 1}) == 0.0);
    CHECK_THROWS_AS(ellipse_area({1, 0.5, 0.2, 1}), Error);
}

TEST_CASE("property: ellipse area is pi times the eigenvalue product") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::Matrix2d a;
        a << g(rng), g(rng), g(rng), g(rng);
        const Eigen::Matrix2d spd = a * a.transpose() + 1e-3 * Eigen::Matrix2d::Identity();
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(spd);
        const double oracle = kPi * eig.eigenvalues()(0) * eig.eigenvalues()(1);
        const double area = ellipse_area({spd(0, 0), spd(0, 1), spd(1, 0), spd(1, 1)});
        CHECK(std::abs(area - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
        CHECK(std::abs(area - kPi * spd.determinant()) <= 1e-9 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("box filter: worked example and truncation") {
    const std::vector<double> f{0, 6, 0, 0};
    const auto conv = box_filter(f, 3, ConvWindow::Forward);
    REQUIRE(conv.size() == 4);
    CHECK(conv[0] == 2.0);
    CHECK(conv[3] == 0.0);  // only one sample left
    const auto trailing = box_filter(f, 3, ConvWindow::Trailing);
    CHECK(trailing[1] == 3.0);  // (0 + 6) / 2 at the truncated start
}

TEST_CASE("property: streaming box filter matches the brute-force window mean") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> f(5 + rng() % 200);
        for (auto& v : f) v = u(rng);
        const std::size_t width = 1 + rng() % 25;
        for (ConvWindow dir : {ConvWindow::Forward, ConvWindow::Trailing}) {
            const auto conv = box_filter(f, width, dir);
            REQUIRE(conv.size() == f.size());
            for (std::size_t k = 0; k < f.size(); ++k)
                CHECK(std::abs(conv[k] - brute_window_mean(f, k, width, dir)) <= 1e-12 * 100.0);
        }
    }
}

TEST_CASE("find_local_peaks: worked cases") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    CHECK(find_local_peaks(std::vector<double>{0, 1, 3, 1, 0}, t, 2.0) == std::vector<std::size_t>{2});
    CHECK(find_local_peaks(std::vector<double>{2, 2, 2, 2, 2}, t, 2.0).empty());
    CHECK(find_local_peaks(std::vector<double>{0, 5, 5, 0, 0}, t, 2.0).empty());
    CHECK_THROWS_AS(find_local_peaks(std::vector<double>{1, 2}, t, 2.0), Error);
}

TEST_CASE("property: every reported peak passes the brute-force predicate and none are missed") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> level(0, 6);  // small range forces ties
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3 + rng() % 60;
        std::vector<double> v(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = level(rng);
            t[i] = static_cast<double>(i);
        }
        const double N = 1.0 + static_cast<double>(rng() % 5);
        const auto peaks = find_local_peaks(v, t, N);
        CHECK(std::is_sorted(peaks.begin(), peaks.end()));
        for (std::size_t k = 0; k < n; ++k) {
            const bool reported = std::find(peaks.begin(), peaks.end(), k) != peaks.end();
            CHECK(reported == brute_is_peak(v, t, k, N));
        }
    }
}

TEST_CASE("intensity_series: a static distribution has no change") {
    const auto s = lattice_series(60, [](int, double) { return Position{}; });
    const auto series = intensity_series(s, DetectorConfig{});
    CHECK(series.area.size() == series.t.size());
    CHECK(series.diff.size() == series.t.size() - 1);
    CHECK(std::all_of(series.diff.begin(), series.diff.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(series.conv.begin(), series.conv.end(), [](double v) { return v == 0.0; }));
    CHECK(detect_intense_periods(s, DetectorConfig{}).empty());
    CHECK(speed_baseline_periods(s, DetectorConfig{}).empty());
}

TEST_CASE("intensity_series: too short a half is rejected") {
    const auto s = lattice_series(15, breathing);
    CHECK_THROWS_AS(intensity_series(s, DetectorConfig{}), Error);
}

TEST_CASE("property: scaling coordinates by 2 scales S and f by 16") {
    const auto s = lattice_series(120, breathing);
    const auto a = intensity_series(s, DetectorConfig{});
    const auto b = intensity_series(transform(s, 2.0, {0, 0}), DetectorConfig{});
    REQUIRE(a.area.size() == b.area.size());
    for (std::size_t i = 0; i < a.area.size(); ++i) CHECK(b.area[i] == doctest::Approx(16.0 * a.area[i]));
    for (std::size_t i = 0; i < a.diff.size(); ++i)
        CHECK(b.diff[i] == doctest::Approx(16.0 * a.diff[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("property: translation leaves the signal and the peaks unchanged") {
    const auto s = lattice_series(200, breathing);
    const auto shifted = transform(s, 1.0, {-7.5, 4.25});
    const auto a = intensity_series(s, DetectorConfig{});
    const auto b = intensity_series(shifted, DetectorConfig{});
    for (std::size_t i = 0; i < a.area.size(); ++i) CHECK(b.area[i] == doctest::Approx(a.area[i]).epsilon(1e-9));
    for (std::size_t i = 0; i < a.conv.size(); ++i)
        CHECK(b.conv[i] == doctest::Approx(a.conv[i]).epsilon(1e-6).scale(1.0));
    const auto pa = detect_intense_periods(s, DetectorConfig{});
    const auto pb = detect_intense_periods(shifted, DetectorConfig{});
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].peak_t == pb[i].peak_t);
}

TEST_CASE("detect_intense_periods: periods are 2N long, sorted and distinct") {
    const auto s = lattice_series(300, breathing);
    DetectorConfig cfg;
    cfg.half_window = 10;
    const auto periods = detect_intense_periods(s, cfg);
    REQUIRE_FALSE(periods.empty());
    for (std::size_t i = 0; i < periods.size(); ++i) {
        CHECK(periods[i].end - periods[i].start == doctest::Approx(20.0));
        CHECK(periods[i].start >= 0.0);
        if (i > 0) CHECK(periods[i].peak_t > periods[i - 1].peak_t);
    }
    const auto ranked = rank_by_score(periods);
    for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score >= ranked[i].score);
}

TEST_CASE("speed baseline locates a lone sprinter") {
    // Small jitter everywhere; player 7 sprints along y through the centroid
    // between t = 60 and t = 70.
    auto motion = [](int i, double t) {
        Position d{0.05 * std::sin(1.3 * t + i), 0.05 * std::cos(1.7 * t + 2 * i)};
        if (i == 7 && t >= 60.0 && t < 70.0) d.y += 8.0 * std::sin(kPi * (t - 60.0) / 5.0);
        return d;
    };
    const auto s = lattice_series(150, motion);
    const DetectorConfig cfg;
    const auto speed = rank_by_score(speed_baseline_periods(s, cfg));
    REQUIRE_FALSE(speed.empty());
    CHECK(speed.front().peak_t >= 50.0);
    CHECK(speed.front().peak_t <= 70.0);
}

TEST_CASE("detector config validation") {
    DetectorConfig cfg;
    cfg.half_window = 0.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.half_window = 10;
    cfg.sample_rate = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
