#include "pitchvalue/fvi.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace pitchvalue {

namespace {

struct Rows {
    Dataset data;
    std::vector<int> rewards;
    std::vector<bool> last;
    std::vector<double> exact;
};

Rows collect(const std::vector<Episode>& episodes, const std::vector<std::size_t>& which, double gamma,
             const Featurizer& featurize) {
    Rows rows;
    for (auto e : which) {
        const auto& ep = episodes[e];
        const auto exact = exact_backward_values(ep, gamma);
        for (std::size_t k = 0; k < ep.size(); ++k) {
            auto f = featurize(ep.states[k]);
            if (rows.data.dims == 0) rows.data.dims = f.size();
            rows.data.add(f, ep.rewards[k]);
            rows.rewards.push_back(ep.rewards[k]);
            rows.last.push_back(k + 1 == ep.size());
            rows.exact.push_back(exact[k]);
        }
    }
    return rows;
}

}  // namespace

Featurizer schema_featurizer(const FeatureSchema& schema) {
    schema.validate();
    return [schema](const StateFeature& x) { return encode(x, schema); };
}

Featurizer discrete_featurizer(const DiscretizationSpec& spec, const PitchSpec& pitch, double half_length) {
    spec.validate();
    return [spec, pitch, half_length](const StateFeature& x) {
        const auto k = discretize(x, spec, pitch, half_length);
        return std::vector<double>{static_cast<double>(k.cell), static_cast<double>(k.e),
                                   static_cast<double>(k.time_bucket), static_cast<double>(k.score_bucket)};
    };
}

void FviConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("precondition", "gamma must lie in [0, 1]");
    if (max_iterations < 1) throw Error("precondition", "max iterations must be >= 1");
    if (!(tolerance > 0.0)) throw Error("precondition", "tolerance must be positive");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw Error("precondition", "train fraction must lie in (0, 1]");
    }
    if (regressor.kind == RegressorKind::Forest) regressor.forest.validate();
}

void split_episodes(std::size_t n, double train_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                    std::vector<std::size_t>& valid) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, n == 0 ? 0 : 1, n);
    train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    valid.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
}

FviResult run_fvi(const std::vector<Episode>& episodes, const FviConfig& cfg, const Featurizer& featurize) {
    cfg.validate();
    if (episodes.empty()) throw Error("precondition", "no episodes to train on");
    for (const auto& ep : episodes)
        if (ep.size() == 0 || ep.rewards.size() != ep.size()) throw Error("precondition", "malformed episode");

    FviResult res;
    split_episodes(episodes.size(), cfg.train_fraction, cfg.seed, res.train_episodes, res.valid_episodes);
    Rows train = collect(episodes, res.train_episodes, cfg.gamma, featurize);
    Rows valid = collect(episodes, res.valid_episodes, cfg.gamma, featurize);
    if (!valid.rewards.empty() && valid.data.dims != train.data.dims) {
        throw Error("precondition", "featurizer produced inconsistent dimensionality");
    }
    const std::size_t n = train.rewards.size();

    // Values start at the rewards.
    std::vector<double> v(train.rewards.begin(), train.rewards.end());
    std::vector<double> next(n);
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        train.data.y = v;
        auto model = make_regressor(cfg.regressor);
        model->fit(train.data, cfg.seed);
        const auto phi = model->predict_all(train.data);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // Rows of one episode are contiguous, so i + 1 is the next state.
            next[i] = train.last[i] ? 0.0 : train.rewards[i] + cfg.gamma * phi[i + 1];
            delta = std::max(delta, std::abs(next[i] - v[i]));
        }
        v.swap(next);

        FviIteration rec;
        rec.iter = it;
        rec.max_delta = delta;
        rec.train_rmse = rmse(phi, train.exact);
        rec.valid_rmse = valid.rewards.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : rmse(model->predict_all(valid.data), valid.exact);
        res.history.push_back(rec);
        res.iterations = it;
        res.model = std::move(model);
        if (!std::isfinite(delta)) throw Error("numeric", "value update diverged");
        if (delta < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.valid_rmse = res.history.back().valid_rmse;
    return res;
}

void write_training_report(std::ostream& out, const FviResult& result) {
    out << "iter,max_delta_v,train_rmse,valid_rmse\n";
    for (const auto& h : result.history) {
        out << h.iter << ',' << detail::exact(h.max_delta) << ',' << detail::exact(h.train_rmse) << ','
            << (std::isnan(h.valid_rmse) ? std::string("nan") : detail::exact(h.valid_rmse)) << '\n';
    }
}

}  // namespace pitchvalue
