#include "pitchvalue/intensity.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>

namespace pitchvalue {

namespace {

bool included(const PlayerSample& p, const DetectorConfig& cfg) {
    if (p.is_goalkeeper && !cfg.include_goalkeepers) return false;
    switch (cfg.teams) {
        case DistributionTeams::AOnly: return p.team == Team::A;
        case DistributionTeams::BOnly: return p.team == Team::B;
        case DistributionTeams::Both: return true;
    }
    return true;
}

// Sample indices of the frame nearest each grid point, skipping grid points
// with no frame within half a grid step.
struct Grid {
    std::vector<double> t;
    std::vector<std::size_t> frame;
};

Grid sample_grid(const FrameSeries& series, const DetectorConfig& cfg) {
    cfg.validate();
    if (series.frames.empty()) throw Error("precondition", "series too short");
    const double t0 = series.start_time();
    const double t1 = series.end_time();
    if (t1 - t0 < 2.0 * cfg.half_window + 2.0) {
        throw Error("precondition", "series too short");
    }
    const double step = 1.0 / cfg.sample_rate;
    const double tol = 0.5 * step + 1e-9;
    Grid g;
    for (std::size_t i = 0;; ++i) {
        double t = t0 + static_cast<double>(i) * step;
        if (t > t1 + 1e-9) break;
        std::size_t k = nearest_frame(series, t);
        if (std::abs(series.frames[k].t - t) > tol) continue;
        g.t.push_back(t);
        g.frame.push_back(k);
    }
    if (g.t.size() < 2) throw Error("precondition", "series too short");
    return g;
}

std::size_t window_samples(const DetectorConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.half_window * cfg.sample_rate)) + 1;
}

double mean_speed(const Frame& prev, const Frame& cur, const DetectorConfig& cfg) {
    const double dt = cur.t - prev.t;
    if (dt <= 0.0) return 0.0;
    std::map<std::pair<int, int>, Position> before;
    for (const auto& p : prev.players)
        if (included(p, cfg)) before[{static_cast<int>(p.team), p.player_id}] = p.pos;
    double sum = 0.0;
    int n = 0;
    for (const auto& p : cur.players) {
        if (!included(p, cfg)) continue;
        auto it = before.find({static_cast<int>(p.team), p.player_id});
        if (it == before.end()) continue;
        sum += std::hypot(p.pos.x - it->second.x, p.pos.y - it->second.y) / dt;
        ++n;
    }
    return n == 0 ? 0.0 : sum / n;
}

std::vector<IntensePeriod> periods_from(const std::vector<double>& conv_t,
                                        const std::vector<double>& conv,
                                        const FrameSeries& series, double half_window) {
    std::vector<IntensePeriod> out;
    const double lo = series.start_time();
    const double hi = series.end_time();
    for (auto k : find_local_peaks(conv, conv_t, half_window)) {
        IntensePeriod p;
        p.peak_t = conv_t[k];
        p.start = p.peak_t - half_window;
        p.end = p.peak_t + half_window;
        // Shift into the half while keeping the 2N length.
        if (p.start < lo) {
            p.end += lo - p.start;
            p.start = lo;
        }
        if (p.end > hi && hi - lo >= 2.0 * half_window) {
            p.start -= p.end - hi;
            p.end = hi;
        }
        p.score = conv[k];
        out.push_back(p);
    }
    return out;
}

}  // namespace

void DetectorConfig::validate() const {
    if (!(half_window >= 1.0)) throw Error("precondition", "N must be >= 1 second");
    if (!(sample_rate > 0.0)) throw Error("precondition", "sample rate must be positive");
}

Cov2 covariance_at(const Frame& frame, const DetectorConfig& cfg) {
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (const auto& p : frame.players) {
        if (!included(p, cfg)) continue;
        sx += p.pos.x;
        sy += p.pos.y;
        ++n;
    }
    if (n < 2) throw Error("precondition", "fewer than 2 included players");
    const double mx = sx / n, my = sy / n;
    double xx = 0.0, xy = 0.0, yy = 0.0;
    for (const auto& p : frame.players) {
        if (!included(p, cfg)) continue;
        const double dx = p.pos.x - mx, dy = p.pos.y - my;
        xx += dx * dx;
        xy += dx * dy;
        yy += dy * dy;
    }
    return {xx / n, xy / n, xy / n, yy / n};
}

double ellipse_area(const Cov2& c) {
    const double scale = std::max({1.0, std::abs(c.xy), std::abs(c.yx)});
    if (std::abs(c.xy - c.yx) > 1e-12 * scale) {
        throw Error("precondition", "covariance matrix is not symmetric");
    }
    const double half_trace = 0.5 * (c.xx + c.yy);
    const double half_gap = 0.5 * (c.xx - c.yy);
    const double r = std::sqrt(half_gap * half_gap + c.xy * c.xy);
    const double a = std::max(half_trace + r, 0.0);
    const double b = std::max(half_trace - r, 0.0);
    return std::numbers::pi * a * b;
}

std::vector<double> box_filter(std::span<const double> signal, std::size_t width, ConvWindow dir) {
    const std::size_t n = signal.size();
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + signal[i];
    std::vector<double> out(n, 0.0);
    if (width == 0) return out;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t lo, hi;  // [lo, hi)
        if (dir == ConvWindow::Forward) {
            lo = k;
            hi = std::min(n, k + width);
        } else {
            lo = k + 1 >= width ? k + 1 - width : 0;
            hi = k + 1;
        }
        out[k] = static_cast<double>((prefix[hi] - prefix[lo]) / static_cast<long double>(hi - lo));
    }
    return out;
}

IntensitySeries intensity_series(const FrameSeries& series, const DetectorConfig& cfg) {
    Grid g = sample_grid(series, cfg);
    IntensitySeries s;
    s.t = std::move(g.t);
    s.area.reserve(s.t.size());
    for (auto k : g.frame) s.area.push_back(ellipse_area(covariance_at(series.frames[k], cfg)));
    s.diff.resize(s.t.size() - 1);
    for (std::size_t i = 1; i < s.t.size(); ++i) s.diff[i - 1] = std::abs(s.area[i] - s.area[i - 1]);
    s.window_samples = window_samples(cfg);
    s.conv = box_filter(s.diff, s.window_samples, cfg.window);
    return s;
}

std::vector<std::size_t> find_local_peaks(std::span<const double> values,
                                          std::span<const double> times, double half_window) {
    if (values.size() != times.size()) {
        throw Error("precondition", "peak search: values and times differ in length");
    }
    const double reach = half_window + 1e-9;
    std::vector<std::size_t> peaks;
    const std::size_t n = values.size();
    for (std::size_t k = 0; k < n; ++k) {
        bool peak = true;
        for (std::size_t j = k; j-- > 0 && times[k] - times[j] <= reach;) {
            if (!(values[k] > values[j])) {
                peak = false;
                break;
            }
        }
        for (std::size_t j = k + 1; peak && j < n && times[j] - times[k] <= reach; ++j) {
            if (!(values[k] > values[j])) peak = false;
        }
        if (peak) peaks.push_back(k);
    }
    return peaks;
}

std::vector<IntensePeriod> detect_intense_periods(const FrameSeries& series,
                                                  const DetectorConfig& cfg) {
    IntensitySeries s = intensity_series(series, cfg);
    std::vector<double> ct(s.t.begin() + 1, s.t.end());
    return periods_from(ct, s.conv, series, cfg.half_window);
}

std::vector<IntensePeriod> speed_baseline_periods(const FrameSeries& series,
                                                  const DetectorConfig& cfg) {
    Grid g = sample_grid(series, cfg);
    std::vector<double> speed(g.t.size() - 1);
    for (std::size_t i = 1; i < g.t.size(); ++i) {
        speed[i - 1] = mean_speed(series.frames[g.frame[i - 1]], series.frames[g.frame[i]], cfg);
    }
    auto conv = box_filter(speed, window_samples(cfg), cfg.window);
    std::vector<double> ct(g.t.begin() + 1, g.t.end());
    return periods_from(ct, conv, series, cfg.half_window);
}

std::vector<IntensePeriod> rank_by_score(std::vector<IntensePeriod> periods) {
    std::stable_sort(periods.begin(), periods.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.peak_t < b.peak_t;
    });
    return periods;
}

void write_intensity_dump(std::ostream& out, const IntensitySeries& s) {
    out << "t,S,f,conv\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        out << detail::fixed(s.t[i]) << ',' << detail::exact(s.area[i]) << ',';
        if (i > 0) out << detail::exact(s.diff[i - 1]) << ',' << detail::exact(s.conv[i - 1]);
        else out << ',';
        out << '\n';
    }
}

void write_highlights(std::ostream& out, const std::vector<IntensePeriod>& ranked) {
    out << "rank,peak_t,start,end,score\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& p = ranked[i];
        out << i + 1 << ',' << detail::fixed(p.peak_t) << ',' << detail::fixed(p.start) << ','
            << detail::fixed(p.end) << ',' << detail::exact(p.score) << '\n';
    }
}

}  // namespace pitchvalue
