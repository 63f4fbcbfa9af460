#include "pitchvalue/chain.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>

namespace pitchvalue {

namespace {

int bucket(double v, double extent, int n) {
    const int b = static_cast<int>(std::floor(v / extent * n));
    return std::clamp(b, 0, n - 1);
}

double unit(double v, double extent) { return std::clamp(v / extent, 0.0, 1.0); }

}  // namespace

Side side_of(Team t) { return t == Team::A ? Side::Home : Side::Away; }

std::string_view side_name(Side s) { return s == Side::Home ? "home" : "away"; }

std::optional<Side> parse_side(std::string_view s) {
    std::string v(detail::trim(s));
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "home" || v == "h" || v == "0") return Side::Home;
    if (v == "away" || v == "a" || v == "1") return Side::Away;
    return std::nullopt;
}

Episode build_episode(const std::vector<SignificantEvent>& events, double half_length, Side side,
                      std::string id) {
    if (events.empty()) throw Error("precondition", "episode needs at least one event");
    Episode ep;
    ep.id = std::move(id);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && !(e.t > events[i - 1].t)) throw Error("precondition", "events out of order");
        if (e.t < 0.0 || e.t > half_length) throw Error("precondition", "event outside the half");
        ep.states.push_back({e.type, e.location, e.t, e.own_score, e.opp_score, side});
        ep.rewards.push_back(e.reward);
    }
    return ep;
}

std::size_t FeatureSchema::dims() const {
    return event_types.size() + 3 + (score_difference ? 1 : 2) + 1;
}

std::vector<std::string> FeatureSchema::feature_names() const {
    std::vector<std::string> names;
    for (auto e : event_types) names.push_back("e_" + std::string(event_type_code(e)));
    names.insert(names.end(), {"x", "y", "t"});
    if (score_difference) names.push_back("score_diff");
    else names.insert(names.end(), {"own", "opp"});
    names.push_back("h");
    return names;
}

std::string FeatureSchema::hash() const {
    std::string desc = "schema-v1;types=";
    for (auto e : event_types) desc += std::string(event_type_code(e)) + ",";
    desc += ";L=" + detail::exact(pitch.length) + ";W=" + detail::exact(pitch.width) +
            ";T=" + detail::exact(half_length) + (score_difference ? ";score=diff" : ";score=pair");
    return detail::hex64(detail::fnv1a(desc));
}

void FeatureSchema::validate() const {
    pitch.validate();
    if (!(half_length > 0.0)) throw Error("precondition", "half length must be positive");
    if (event_types.empty()) throw Error("precondition", "schema has no event types");
}

std::vector<double> encode(const StateFeature& x, const FeatureSchema& schema) {
    std::vector<double> v(schema.dims(), 0.0);
    auto it = std::find(schema.event_types.begin(), schema.event_types.end(), x.e);
    if (it == schema.event_types.end()) {
        throw Error("schema", "event type " + std::string(event_type_code(x.e)) + " not in schema");
    }
    std::size_t k = static_cast<std::size_t>(it - schema.event_types.begin());
    v[k] = 1.0;
    k = schema.event_types.size();
    v[k++] = unit(x.l.x, schema.pitch.length);
    v[k++] = unit(x.l.y, schema.pitch.width);
    v[k++] = unit(x.t, schema.half_length);
    if (schema.score_difference) {
        v[k++] = x.own - x.opp;
    } else {
        v[k++] = x.own;
        v[k++] = x.opp;
    }
    v[k] = x.h == Side::Away ? 1.0 : 0.0;
    return v;
}

std::vector<double> exact_backward_values(const Episode& ep, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("precondition", "gamma must lie in [0, 1]");
    std::vector<double> v(ep.size(), 0.0);
    for (std::size_t k = ep.size(); k-- > 1;) v[k - 1] = ep.rewards[k - 1] + gamma * v[k];
    return v;
}

void DiscretizationSpec::validate() const {
    if (nx < 1 || ny < 1) throw Error("precondition", "grid dimensions must be >= 1");
    if (time_buckets < 1) throw Error("precondition", "time buckets must be >= 1");
}

DiscreteKey discretize(const StateFeature& x, const DiscretizationSpec& spec, const PitchSpec& pitch,
                       double half_length) {
    const int ix = bucket(x.l.x, pitch.length, spec.nx);
    const int iy = bucket(x.l.y, pitch.width, spec.ny);
    const int diff = x.own - x.opp;
    return {iy * spec.nx + ix, x.e, bucket(x.t, half_length, spec.time_buckets),
            diff < 0 ? 0 : (diff == 0 ? 1 : 2)};
}

std::string discrete_label(const DiscreteKey& key) {
    static constexpr const char* kScore[] = {"behind", "level", "ahead"};
    return std::string(event_type_code(key.e)) + "|cell" + std::to_string(key.cell) + "|tb" +
           std::to_string(key.time_bucket) + "|" + kScore[key.score_bucket];
}

void MarkovChain::validate(double tol) const {
    if (P.size() != r.size() || labels.size() != r.size()) {
        throw Error("precondition", "chain sizes disagree");
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
        double sum = 0.0;
        for (const auto& [j, p] : P[i]) {
            if (j >= P.size()) throw Error("precondition", "transition to unknown state");
            if (!(p >= 0.0 && p <= 1.0)) throw Error("precondition", "probability outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw Error("precondition", "row " + labels[i] + " does not sum to 1");
        }
        if (!std::isfinite(r[i])) throw Error("precondition", "non-finite reward");
    }
}

std::size_t DiscretizedChain::state_of(const StateFeature& x) const {
    auto it = index.find(discretize(x, spec, pitch, half_length));
    if (it == index.end()) throw Error("precondition", "state not present in the chain");
    return it->second;
}

DiscretizedChain discretize_and_estimate(const std::vector<Episode>& episodes,
                                         const DiscretizationSpec& spec, const PitchSpec& pitch,
                                         double half_length) {
    spec.validate();
    pitch.validate();
    if (episodes.empty()) throw Error("precondition", "no episodes to estimate from");
    DiscretizedChain dc;
    dc.spec = spec;
    dc.pitch = pitch;
    dc.half_length = half_length;

    // Index states in sorted key order so labels do not depend on episode order.
    for (const auto& ep : episodes)
        for (const auto& x : ep.states) dc.index.emplace(discretize(x, spec, pitch, half_length), 0);
    std::size_t n = 0;
    for (auto& [key, idx] : dc.index) {
        idx = n++;
        dc.chain.labels.push_back(discrete_label(key));
    }
    dc.terminal = n++;
    dc.chain.labels.push_back("TERMINAL");

    dc.counts.assign(n, {});
    std::vector<double> reward_sum(n, 0.0);
    std::vector<std::size_t> visits(n, 0);
    for (const auto& ep : episodes) {
        for (std::size_t k = 0; k < ep.size(); ++k) {
            const std::size_t s = dc.index.at(discretize(ep.states[k], spec, pitch, half_length));
            const bool last = k + 1 == ep.size();
            const std::size_t next =
                last ? dc.terminal : dc.index.at(discretize(ep.states[k + 1], spec, pitch, half_length));
            ++dc.counts[s][next];
            ++visits[s];
            if (!last) reward_sum[s] += ep.rewards[k];
        }
    }
    dc.counts[dc.terminal][dc.terminal] = 1;
    visits[dc.terminal] = 1;

    dc.chain.P.resize(n);
    dc.chain.r.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double total = static_cast<double>(visits[s]);
        for (const auto& [j, c] : dc.counts[s]) dc.chain.P[s].push_back({j, static_cast<double>(c) / total});
        dc.chain.r[s] = reward_sum[s] / total;
    }
    return dc;
}

void write_episode(std::ostream& out, const Episode& ep) {
    out << "t,e,x,y,own,opp,h,reward,terminal\n";
    for (std::size_t k = 0; k < ep.size(); ++k) {
        const auto& x = ep.states[k];
        out << detail::fixed(x.t) << ',' << event_type_code(x.e) << ',' << detail::fixed(x.l.x) << ','
            << detail::fixed(x.l.y) << ',' << x.own << ',' << x.opp << ',' << side_name(x.h) << ','
            << ep.rewards[k] << ',' << (k + 1 == ep.size() ? 1 : 0) << '\n';
    }
}

void write_episode(const std::filesystem::path& path, const Episode& ep) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    write_episode(out, ep);
    if (!out) throw Error("io", "write failed: " + path.string());
}

}  // namespace pitchvalue
