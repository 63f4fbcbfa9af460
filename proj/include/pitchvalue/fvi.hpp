#pragma once

#include "pitchvalue/chain.hpp"
#include "pitchvalue/regressors.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace pitchvalue {

// Maps a state to the regression input.
using Featurizer = std::function<std::vector<double>(const StateFeature&)>;

Featurizer schema_featurizer(const FeatureSchema& schema);
// Key (cell, event type, time bucket, score bucket) of the discretized chain,
// so a table regressor holds exactly one entry per discrete state.
Featurizer discrete_featurizer(const DiscretizationSpec& spec, const PitchSpec& pitch, double half_length);

struct FviConfig {
    double gamma = 1.0;
    int max_iterations = 50;
    double tolerance = 1e-4;  // early stop on max |delta v|
    RegressorSpec regressor;
    double train_fraction = 0.7;  // share of episodes used for fitting
    std::uint64_t seed = 1;

    void validate() const;
};

struct FviIteration {
    int iter = 0;
    double max_delta = 0.0;
    double train_rmse = 0.0;  // against exact backward values
    double valid_rmse = 0.0;  // NaN without validation episodes
};

struct FviResult {
    std::unique_ptr<Regressor> model;
    std::vector<FviIteration> history;
    int iterations = 0;
    bool converged = false;
    double valid_rmse = 0.0;
    std::vector<std::size_t> train_episodes;
    std::vector<std::size_t> valid_episodes;
};

// Deterministic shuffle of episode indices; the first share trains.
void split_episodes(std::size_t n, double train_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                    std::vector<std::size_t>& valid);

// Fitted-value iteration: v <- r, then repeatedly fit phi on (X, v) and set
// v(X_t) <- r_t + gamma phi(X_{t+1}), with v = 0 on each episode's last state.
FviResult run_fvi(const std::vector<Episode>& episodes, const FviConfig& cfg, const Featurizer& featurize);

void write_training_report(std::ostream& out, const FviResult& result);

}  // namespace pitchvalue
