#pragma once

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pitchvalue {

// Row-major feature matrix plus targets.
struct Dataset {
    std::size_t dims = 0;
    std::vector<double> x;
    std::vector<double> y;

    Dataset() = default;
    explicit Dataset(std::size_t d) : dims(d) {}

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * dims, dims}; }
    void add(std::span<const double> features, double target);
    void validate() const;  // non-empty, consistent sizes, finite values
};

enum class RegressorKind { Linear, Forest, Table };

std::string_view regressor_kind_name(RegressorKind k);
RegressorKind parse_regressor_kind(std::string_view s);

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12;  // 0 means unlimited
    int min_samples_leaf = 5;
    bool bootstrap = true;
    double feature_fraction = 1.0;  // share of features tried at each split

    void validate() const;
};

struct RegressorSpec {
    RegressorKind kind = RegressorKind::Forest;
    ForestParams forest;
};

class Regressor {
public:
    virtual ~Regressor() = default;

    virtual RegressorKind kind() const = 0;
    virtual void fit(const Dataset& data, std::uint64_t seed) = 0;
    virtual double predict(std::span<const double> x) const = 0;
    virtual std::size_t dims() const = 0;

    std::vector<double> predict_all(const Dataset& data) const;

    virtual void write_payload(std::ostream& out) const = 0;
    virtual void read_payload(std::istream& in) = 0;

protected:
    void check_dims(std::span<const double> x) const;
};

// Least squares on centered data with a 1e-8 ridge on the weights.
class LinearRegressor final : public Regressor {
public:
    static constexpr double kRidge = 1e-8;

    RegressorKind kind() const override { return RegressorKind::Linear; }
    void fit(const Dataset& data, std::uint64_t seed) override;
    double predict(std::span<const double> x) const override;
    std::size_t dims() const override { return weights_.size(); }

    const std::vector<double>& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    // True when every feature was constant and the fit fell back to the mean.
    bool intercept_only() const { return intercept_only_; }

    void write_payload(std::ostream& out) const override;
    void read_payload(std::istream& in) override;

private:
    std::vector<double> weights_;
    double intercept_ = 0.0;
    bool intercept_only_ = false;
};

// Random forest of CART regression trees (variance-reduction splits).
class ForestRegressor final : public Regressor {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;  // x <= threshold goes left
        int left = -1;
        int right = -1;
        double value = 0.0;
        double weight = 0.0;  // training rows (with bootstrap multiplicity) reaching the node
    };
    using Tree = std::vector<Node>;

    explicit ForestRegressor(ForestParams params = {});

    RegressorKind kind() const override { return RegressorKind::Forest; }
    void fit(const Dataset& data, std::uint64_t seed) override;
    double predict(std::span<const double> x) const override;
    std::size_t dims() const override { return dims_; }

    const ForestParams& params() const { return params_; }
    const std::vector<Tree>& trees() const { return trees_; }

    void write_payload(std::ostream& out) const override;
    void read_payload(std::istream& in) override;

private:
    ForestParams params_;
    std::size_t dims_ = 0;
    std::vector<Tree> trees_;
};

// Memorizes the mean target per exact feature vector; unseen keys give 0.
class TableRegressor final : public Regressor {
public:
    RegressorKind kind() const override { return RegressorKind::Table; }
    void fit(const Dataset& data, std::uint64_t seed) override;
    double predict(std::span<const double> x) const override;
    std::size_t dims() const override { return dims_; }

    const std::map<std::vector<double>, double>& table() const { return table_; }

    void write_payload(std::ostream& out) const override;
    void read_payload(std::istream& in) override;

private:
    std::size_t dims_ = 0;
    std::map<std::vector<double>, double> table_;
};

std::unique_ptr<Regressor> make_regressor(const RegressorSpec& spec);

double rmse(std::span<const double> predictions, std::span<const double> targets);

// Model file: "PVMODEL1", a little-endian u64 header length, a JSON header
// ({"kind", "dims", "meta"}), then the model payload.
void save_model(std::ostream& out, const Regressor& model, const nlohmann::json& meta);
void save_model(const std::filesystem::path& path, const Regressor& model, const nlohmann::json& meta);

struct LoadedModel {
    std::unique_ptr<Regressor> model;
    nlohmann::json meta;
};

LoadedModel load_model(std::istream& in);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace pitchvalue
