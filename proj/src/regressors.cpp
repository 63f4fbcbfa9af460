#include "pitchvalue/regressors.hpp"

#include "pitchvalue/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>

namespace pitchvalue {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'V', 'M', 'O', 'D', 'E', 'L', '1'};

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("format", "truncated model payload");
    return v;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in, std::size_t limit) {
    const auto n = get<std::uint64_t>(in);
    if (n > limit) throw Error("format", "implausible array length in model payload");
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw Error("format", "truncated model payload");
    return v;
}

constexpr std::size_t kMaxArray = std::size_t{1} << 32;

// One tree, grown on presorted per-feature row orders. Each node owns the
// same [lo, hi) range in every feature's order array.
class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const std::vector<double>& xcol, const ForestParams& params,
                const std::vector<std::vector<std::uint32_t>>& global_order, std::uint64_t seed)
        : data_(data), xcol_(xcol), params_(params), n_(data.size()), d_(data.dims), rng_(seed) {
        w_.assign(n_, 0.0);
        if (params.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
            for (std::size_t k = 0; k < n_; ++k) w_[pick(rng_)] += 1.0;
        } else {
            std::fill(w_.begin(), w_.end(), 1.0);
        }
        for (std::size_t r = 0; r < n_; ++r) m_ += w_[r] > 0.0 ? 1 : 0;
        order_.resize(d_ * m_);
        for (std::size_t f = 0; f < d_; ++f) {
            std::size_t k = 0;
            for (auto r : global_order[f])
                if (w_[r] > 0.0) order_[f * m_ + k++] = r;
        }
        left_.assign(n_, 0);
        scratch_.resize(m_);
        features_.resize(d_);
        std::iota(features_.begin(), features_.end(), 0);
        const auto k = static_cast<std::size_t>(std::lround(params.feature_fraction * static_cast<double>(d_)));
        n_try_ = std::clamp<std::size_t>(k, 1, d_);
    }

    ForestRegressor::Tree build() {
        ForestRegressor::Tree tree;
        struct Task {
            int node;
            std::size_t lo, hi;
            int depth;
        };
        tree.push_back({});
        std::vector<Task> stack{{0, 0, m_, 0}};
        while (!stack.empty()) {
            const Task task = stack.back();
            stack.pop_back();
            auto split = grow(tree, task.node, task.lo, task.hi, task.depth);
            if (!split) continue;
            const int l = static_cast<int>(tree.size());
            tree.push_back({});
            tree.push_back({});
            tree[static_cast<std::size_t>(task.node)].left = l;
            tree[static_cast<std::size_t>(task.node)].right = l + 1;
            stack.push_back({l + 1, *split, task.hi, task.depth + 1});
            stack.push_back({l, task.lo, *split, task.depth + 1});
        }
        return tree;
    }

private:
    double x(std::size_t r, std::size_t f) const { return xcol_[f * n_ + r]; }

    // Fills the node; returns the split point when the node is split.
    std::optional<std::size_t> grow(ForestRegressor::Tree& tree, int node, std::size_t lo, std::size_t hi,
                                    int depth) {
        double W = 0.0, S = 0.0;
        double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
        for (std::size_t p = lo; p < hi; ++p) {
            const auto r = order_[p];
            W += w_[r];
            S += w_[r] * data_.y[r];
            ymin = std::min(ymin, data_.y[r]);
            ymax = std::max(ymax, data_.y[r]);
        }
        auto& nd = tree[static_cast<std::size_t>(node)];
        nd.value = S / W;
        nd.weight = W;
        const double min_leaf = params_.min_samples_leaf;
        if (ymin == ymax) return std::nullopt;
        if (params_.max_depth > 0 && depth >= params_.max_depth) return std::nullopt;
        if (W < 2.0 * min_leaf) return std::nullopt;

        if (n_try_ < d_) {
            for (std::size_t i = 0; i < n_try_; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, d_ - 1);
                std::swap(features_[i], features_[pick(rng_)]);
            }
        }
        int best_f = -1;
        std::size_t best_pos = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        double best_threshold = 0.0;
        for (std::size_t c = 0; c < n_try_; ++c) {
            const std::size_t f = features_[c];
            const std::uint32_t* ord = order_.data() + f * m_;
            double wl = 0.0, sl = 0.0;
            for (std::size_t p = lo; p + 1 < hi; ++p) {
                const auto r = ord[p];
                wl += w_[r];
                sl += w_[r] * data_.y[r];
                const double xa = x(r, f), xb = x(ord[p + 1], f);
                if (!(xa < xb)) continue;
                const double wr = W - wl;
                if (wl < min_leaf || wr < min_leaf) continue;
                const double sr = S - sl;
                const double score = sl * sl / wl + sr * sr / wr;
                if (score > best_score) {
                    best_score = score;
                    best_f = static_cast<int>(f);
                    best_pos = p + 1;
                    double mid = 0.5 * (xa + xb);
                    if (!(mid < xb)) mid = xa;
                    best_threshold = mid;
                }
            }
        }
        // Any valid split is taken while the node is impure, including
        // zero-gain ones, so full trees can separate every distinct input.
        if (best_f < 0) return std::nullopt;
        nd.feature = best_f;
        nd.threshold = best_threshold;

        const std::size_t bf = static_cast<std::size_t>(best_f);
        for (std::size_t p = lo; p < hi; ++p) {
            const auto r = order_[bf * m_ + p];
            left_[r] = p < best_pos ? 1 : 0;
        }
        for (std::size_t f = 0; f < d_; ++f) {
            if (f == bf) continue;
            std::uint32_t* ord = order_.data() + f * m_;
            std::size_t a = lo, b = 0;
            for (std::size_t p = lo; p < hi; ++p) {
                const auto r = ord[p];
                if (left_[r]) ord[a++] = r;
                else scratch_[b++] = r;
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(b), ord + a);
        }
        return best_pos;
    }

    const Dataset& data_;
    const std::vector<double>& xcol_;
    const ForestParams& params_;
    std::size_t n_, d_, m_ = 0, n_try_ = 1;
    std::mt19937_64 rng_;
    std::vector<double> w_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint8_t> left_;
    std::vector<std::uint32_t> scratch_;
    std::vector<std::size_t> features_;
};

}  // namespace

void Dataset::add(std::span<const double> features, double target) {
    if (features.size() != dims) throw Error("precondition", "feature dimensionality mismatch");
    x.insert(x.end(), features.begin(), features.end());
    y.push_back(target);
}

void Dataset::validate() const {
    if (y.empty()) throw Error("precondition", "empty dataset");
    if (dims == 0 || x.size() != y.size() * dims) throw Error("precondition", "dataset shape is inconsistent");
    for (double v : x)
        if (!std::isfinite(v)) throw Error("precondition", "non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw Error("precondition", "non-finite target");
}

std::string_view regressor_kind_name(RegressorKind k) {
    switch (k) {
        case RegressorKind::Linear: return "linear";
        case RegressorKind::Forest: return "forest";
        case RegressorKind::Table: return "table";
    }
    return "forest";
}

RegressorKind parse_regressor_kind(std::string_view s) {
    if (s == "linear") return RegressorKind::Linear;
    if (s == "forest") return RegressorKind::Forest;
    if (s == "table") return RegressorKind::Table;
    throw Error("precondition", "unknown regressor kind: " + std::string(s));
}

void ForestParams::validate() const {
    if (n_trees < 1) throw Error("precondition", "forest needs at least one tree");
    if (max_depth < 0) throw Error("precondition", "max depth must be >= 0");
    if (min_samples_leaf < 1) throw Error("precondition", "min samples per leaf must be >= 1");
    if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) {
        throw Error("precondition", "feature fraction must lie in (0, 1]");
    }
}

void Regressor::check_dims(std::span<const double> x) const {
    if (x.size() != dims()) {
        throw Error("precondition", "expected " + std::to_string(dims()) + " features, got " +
                                        std::to_string(x.size()));
    }
}

std::vector<double> Regressor::predict_all(const Dataset& data) const {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
}

// Linear -------------------------------------------------------------------

void LinearRegressor::fit(const Dataset& data, std::uint64_t) {
    data.validate();
    const std::size_t n = data.size(), d = data.dims;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        data.x.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::Map<const Eigen::VectorXd> y(data.y.data(), static_cast<Eigen::Index>(n));
    const Eigen::RowVectorXd xmean = X.colwise().mean();
    const double ymean = y.mean();

    weights_.assign(d, 0.0);
    bool all_constant = true;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        if ((X.col(j).array() != X(0, j)).any()) all_constant = false;
    intercept_only_ = all_constant;
    if (all_constant) {
        intercept_ = ymean;
        return;
    }
    const Eigen::MatrixXd Xc = X.rowwise() - xmean;
    Eigen::MatrixXd A = Xc.transpose() * Xc;
    A.diagonal().array() += kRidge;
    const Eigen::VectorXd b = Xc.transpose() * (y.array() - ymean).matrix();
    const Eigen::VectorXd w = A.ldlt().solve(b);
    for (std::size_t j = 0; j < d; ++j) weights_[j] = w[static_cast<Eigen::Index>(j)];
    intercept_ = ymean - xmean.dot(w);
    for (double v : weights_)
        if (!std::isfinite(v)) throw Error("numeric", "linear fit produced non-finite weights");
}

double LinearRegressor::predict(std::span<const double> x) const {
    check_dims(x);
    double v = intercept_;
    for (std::size_t j = 0; j < x.size(); ++j) v += weights_[j] * x[j];
    return v;
}

void LinearRegressor::write_payload(std::ostream& out) const {
    put_doubles(out, weights_);
    put<double>(out, intercept_);
    put<std::uint8_t>(out, intercept_only_ ? 1 : 0);
}

void LinearRegressor::read_payload(std::istream& in) {
    weights_ = get_doubles(in, kMaxArray);
    intercept_ = get<double>(in);
    intercept_only_ = get<std::uint8_t>(in) != 0;
}

// Forest -------------------------------------------------------------------

ForestRegressor::ForestRegressor(ForestParams params) : params_(params) { params_.validate(); }

void ForestRegressor::fit(const Dataset& data, std::uint64_t seed) {
    data.validate();
    params_.validate();
    if (data.size() >= (std::size_t{1} << 32)) throw Error("precondition", "dataset too large");
    const std::size_t n = data.size(), d = data.dims;
    dims_ = d;
    std::vector<double> xcol(n * d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t f = 0; f < d; ++f) xcol[f * n + r] = data.x[r * d + f];
    std::vector<std::vector<std::uint32_t>> order(d, std::vector<std::uint32_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
        auto& o = order[f];
        std::iota(o.begin(), o.end(), 0u);
        const double* col = xcol.data() + f * n;
        std::stable_sort(o.begin(), o.end(), [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
    trees_.clear();
    trees_.reserve(static_cast<std::size_t>(params_.n_trees));
    for (int t = 0; t < params_.n_trees; ++t) {
        TreeBuilder builder(data, xcol, params_, order, splitmix(seed ^ splitmix(static_cast<std::uint64_t>(t))));
        trees_.push_back(builder.build());
    }
}

double ForestRegressor::predict(std::span<const double> x) const {
    check_dims(x);
    if (trees_.empty()) throw Error("precondition", "forest is not fitted");
    double sum = 0.0;
    for (const auto& tree : trees_) {
        std::size_t k = 0;
        while (tree[k].feature >= 0) {
            k = static_cast<std::size_t>(x[static_cast<std::size_t>(tree[k].feature)] <= tree[k].threshold
                                             ? tree[k].left
                                             : tree[k].right);
        }
        sum += tree[k].value;
    }
    return sum / static_cast<double>(trees_.size());
}

void ForestRegressor::write_payload(std::ostream& out) const {
    put<std::int32_t>(out, params_.n_trees);
    put<std::int32_t>(out, params_.max_depth);
    put<std::int32_t>(out, params_.min_samples_leaf);
    put<std::uint8_t>(out, params_.bootstrap ? 1 : 0);
    put<double>(out, params_.feature_fraction);
    put<std::uint64_t>(out, dims_);
    put<std::uint64_t>(out, trees_.size());
    for (const auto& tree : trees_) {
        put<std::uint64_t>(out, tree.size());
        for (const auto& nd : tree) {
            put<std::int32_t>(out, nd.feature);
            put<double>(out, nd.threshold);
            put<std::int32_t>(out, nd.left);
            put<std::int32_t>(out, nd.right);
            put<double>(out, nd.value);
            put<double>(out, nd.weight);
        }
    }
}

void ForestRegressor::read_payload(std::istream& in) {
    params_.n_trees = get<std::int32_t>(in);
    params_.max_depth = get<std::int32_t>(in);
    params_.min_samples_leaf = get<std::int32_t>(in);
    params_.bootstrap = get<std::uint8_t>(in) != 0;
    params_.feature_fraction = get<double>(in);
    params_.validate();
    dims_ = get<std::uint64_t>(in);
    const auto n_trees = get<std::uint64_t>(in);
    if (n_trees > kMaxArray) throw Error("format", "implausible tree count");
    trees_.assign(n_trees, {});
    for (auto& tree : trees_) {
        const auto n_nodes = get<std::uint64_t>(in);
        if (n_nodes == 0 || n_nodes > kMaxArray) throw Error("format", "implausible node count");
        tree.resize(n_nodes);
        for (auto& nd : tree) {
            nd.feature = get<std::int32_t>(in);
            nd.threshold = get<double>(in);
            nd.left = get<std::int32_t>(in);
            nd.right = get<std::int32_t>(in);
            nd.value = get<double>(in);
            nd.weight = get<double>(in);
        }
        // Children must point forward inside the tree so prediction terminates.
        for (std::size_t k = 0; k < tree.size(); ++k) {
            const auto& nd = tree[k];
            if (nd.feature < 0) continue;
            const auto ok = [&](int c) { return c > static_cast<int>(k) && static_cast<std::size_t>(c) < tree.size(); };
            if (static_cast<std::size_t>(nd.feature) >= dims_ || !ok(nd.left) || !ok(nd.right)) {
                throw Error("format", "corrupt tree in model payload");
            }
        }
    }
}

// Table --------------------------------------------------------------------

void TableRegressor::fit(const Dataset& data, std::uint64_t) {
    data.validate();
    dims_ = data.dims;
    std::map<std::vector<double>, std::pair<double, std::size_t>> acc;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto r = data.row(i);
        auto& [sum, count] = acc[std::vector<double>(r.begin(), r.end())];
        sum += data.y[i];
        ++count;
    }
    table_.clear();
    for (const auto& [key, sc] : acc) table_.emplace_hint(table_.end(), key, sc.first / static_cast<double>(sc.second));
}

double TableRegressor::predict(std::span<const double> x) const {
    check_dims(x);
    auto it = table_.find(std::vector<double>(x.begin(), x.end()));
    return it == table_.end() ? 0.0 : it->second;
}

void TableRegressor::write_payload(std::ostream& out) const {
    put<std::uint64_t>(out, dims_);
    put<std::uint64_t>(out, table_.size());
    for (const auto& [key, v] : table_) {
        out.write(reinterpret_cast<const char*>(key.data()), static_cast<std::streamsize>(key.size() * sizeof(double)));
        put<double>(out, v);
    }
}

void TableRegressor::read_payload(std::istream& in) {
    dims_ = get<std::uint64_t>(in);
    const auto n = get<std::uint64_t>(in);
    if (dims_ > 4096 || n > kMaxArray) throw Error("format", "implausible table size");
    table_.clear();
    std::vector<double> key(dims_);
    for (std::uint64_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(key.data()), static_cast<std::streamsize>(dims_ * sizeof(double)));
        if (!in) throw Error("format", "truncated model payload");
        table_.emplace_hint(table_.end(), key, get<double>(in));
    }
}

// Shared -------------------------------------------------------------------

std::unique_ptr<Regressor> make_regressor(const RegressorSpec& spec) {
    switch (spec.kind) {
        case RegressorKind::Linear: return std::make_unique<LinearRegressor>();
        case RegressorKind::Forest: return std::make_unique<ForestRegressor>(spec.forest);
        case RegressorKind::Table: return std::make_unique<TableRegressor>();
    }
    throw Error("precondition", "unknown regressor kind");
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw Error("precondition", "rmse: length mismatch");
    if (predictions.empty()) throw Error("precondition", "rmse: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(predictions.size()));
}

void save_model(std::ostream& out, const Regressor& model, const nlohmann::json& meta) {
    nlohmann::json header{{"kind", regressor_kind_name(model.kind())}, {"dims", model.dims()}, {"meta", meta}};
    const std::string h = header.dump();
    out.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(out, h.size());
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    model.write_payload(out);
}

void save_model(const std::filesystem::path& path, const Regressor& model, const nlohmann::json& meta) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    save_model(out, model, meta);
    if (!out) throw Error("io", "write failed: " + path.string());
}

LoadedModel load_model(std::istream& in) {
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error("format", "not a model file");
    const auto len = get<std::uint64_t>(in);
    if (len > (std::uint64_t{1} << 26)) throw Error("format", "implausible model header");
    std::string h(len, '\0');
    in.read(h.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error("format", "truncated model header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(h);
    } catch (const nlohmann::json::exception& e) {
        throw Error("format", std::string("bad model header: ") + e.what());
    }
    if (!header.contains("kind") || !header["kind"].is_string()) throw Error("format", "model header lacks kind");
    RegressorSpec spec;
    spec.kind = parse_regressor_kind(header["kind"].get<std::string>());
    LoadedModel lm;
    lm.model = make_regressor(spec);
    lm.model->read_payload(in);
    if (header.contains("dims") && header["dims"].get<std::size_t>() != lm.model->dims()) {
        throw Error("format", "model header and payload disagree on dimensionality");
    }
    lm.meta = header.value("meta", nlohmann::json::object());
    return lm;
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    return load_model(in);
}

}  // namespace pitchvalue
