#pragma once

#include "pitchvalue/events.hpp"
#include "pitchvalue/geometry.hpp"

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pitchvalue {

enum class Side { Home, Away };

Side side_of(Team t);  // team A plays at home
std::string_view side_name(Side s);
std::optional<Side> parse_side(std::string_view s);

// X = (e, l, t, s, h).
struct StateFeature {
    EventType e = EventType::InPlay;
    Position l;      // attack-normalized
    double t = 0.0;  // seconds since half start
    int own = 0;
    int opp = 0;
    Side h = Side::Home;

    friend bool operator==(const StateFeature&, const StateFeature&) = default;
};

// One half from one team's perspective. The last state is terminal.
struct Episode {
    std::string id;
    std::vector<StateFeature> states;
    std::vector<int> rewards;

    std::size_t size() const { return states.size(); }
};

Episode build_episode(const std::vector<SignificantEvent>& events, double half_length, Side side,
                      std::string id = {});

// Layout: one-hot event type, x/length, y/width, t/half_length, then either
// (own, opp) or own - opp, then h (0 home, 1 away).
struct FeatureSchema {
    PitchSpec pitch;
    double half_length = 2700.0;
    bool score_difference = false;
    std::vector<EventType> event_types{all_event_types().begin(), all_event_types().end()};

    std::size_t dims() const;
    std::vector<std::string> feature_names() const;
    std::string hash() const;  // 16 hex digits over the layout description
    void validate() const;
};

std::vector<double> encode(const StateFeature& x, const FeatureSchema& schema);

// v(last) = 0; v(k) = r(k) + gamma * v(k + 1).
std::vector<double> exact_backward_values(const Episode& ep, double gamma);

struct DiscretizationSpec {
    int nx = 6;
    int ny = 4;
    int time_buckets = 3;
    // Score difference is always bucketed as {<= -1, 0, >= +1}.

    void validate() const;
};

struct DiscreteKey {
    int cell = 0;  // iy * nx + ix
    EventType e = EventType::InPlay;
    int time_bucket = 0;
    int score_bucket = 0;  // 0: behind, 1: level, 2: ahead

    friend auto operator<=>(const DiscreteKey&, const DiscreteKey&) = default;
};

DiscreteKey discretize(const StateFeature& x, const DiscretizationSpec& spec, const PitchSpec& pitch,
                       double half_length);

// Sparse row-stochastic chain with per-state expected rewards.
struct MarkovChain {
    std::vector<std::string> labels;
    std::vector<std::vector<std::pair<std::size_t, double>>> P;  // rows of (column, probability)
    std::vector<double> r;

    std::size_t size() const { return r.size(); }
    // Rows sum to 1 within tol, entries in [0, 1], indices in range.
    void validate(double tol = 1e-12) const;
};

struct DiscretizedChain {
    DiscretizationSpec spec;
    PitchSpec pitch;
    double half_length = 2700.0;
    std::map<DiscreteKey, std::size_t> index;
    std::size_t terminal = 0;  // absorbing, zero reward
    std::vector<std::map<std::size_t, std::size_t>> counts;
    MarkovChain chain;

    std::size_t state_of(const StateFeature& x) const;  // throws if unseen
};

std::string discrete_label(const DiscreteKey& key);

// Empirical chain. Every episode's last state moves to the terminal state,
// and its own reward is not counted, mirroring v(last) = 0.
DiscretizedChain discretize_and_estimate(const std::vector<Episode>& episodes,
                                         const DiscretizationSpec& spec, const PitchSpec& pitch,
                                         double half_length);

void write_episode(std::ostream& out, const Episode& ep);
void write_episode(const std::filesystem::path& path, const Episode& ep);

}  // namespace pitchvalue
