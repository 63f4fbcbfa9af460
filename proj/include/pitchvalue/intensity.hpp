#pragma once

#include "pitchvalue/tracking.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace pitchvalue {

enum class DistributionTeams { Both, AOnly, BOnly };

// Orientation of the box filter used for the convolution step. Forward takes
// the mean of f over [t, t + N] (the literal reading of g supported on
// [-N, 0]); Trailing uses [t - N, t].
enum class ConvWindow { Forward, Trailing };

struct DetectorConfig {
    double half_window = 10.0;  // N, seconds
    double sample_rate = 1.0;   // Hz at which S(t) is evaluated
    bool include_goalkeepers = false;
    DistributionTeams teams = DistributionTeams::Both;
    ConvWindow window = ConvWindow::Forward;

    void validate() const;
};

// Symmetric 2x2 matrix stored as {xx, xy, yx, yy}.
struct Cov2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

struct IntensitySeries {
    std::vector<double> t;     // sample times
    std::vector<double> area;  // S at each sample
    std::vector<double> diff;  // f, aligned with t[1..]
    std::vector<double> conv;  // box-filtered f, aligned with diff
    std::size_t window_samples = 0;  // nominal n (samples per full window)

    double conv_time(std::size_t k) const { return t[k + 1]; }
};

struct IntensePeriod {
    double peak_t = 0.0;
    double start = 0.0;
    double end = 0.0;
    double score = 0.0;
};

Cov2 covariance_at(const Frame& frame, const DetectorConfig& cfg);
double ellipse_area(const Cov2& cov);

IntensitySeries intensity_series(const FrameSeries& series, const DetectorConfig& cfg);

// Box filter of `signal` as used by intensity_series: mean over `width`
// samples starting at k (forward) or ending at k (trailing), truncated at the
// series ends.
std::vector<double> box_filter(std::span<const double> signal, std::size_t width, ConvWindow dir);

// Indices k with values[k] strictly greater than every other value whose time
// lies within half_window of times[k].
std::vector<std::size_t> find_local_peaks(std::span<const double> values,
                                          std::span<const double> times, double half_window);

std::vector<IntensePeriod> detect_intense_periods(const FrameSeries& series,
                                                  const DetectorConfig& cfg);

// Same pipeline with f(t) replaced by the mean player speed.
std::vector<IntensePeriod> speed_baseline_periods(const FrameSeries& series,
                                                  const DetectorConfig& cfg);

// Periods re-ordered by descending score (ties by peak time).
std::vector<IntensePeriod> rank_by_score(std::vector<IntensePeriod> periods);

void write_intensity_dump(std::ostream& out, const IntensitySeries& s);
void write_highlights(std::ostream& out, const std::vector<IntensePeriod>& ranked);

}  // namespace pitchvalue
