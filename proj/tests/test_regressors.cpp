#include "doctest.h"

#include "pitchvalue/error.hpp"
#include "pitchvalue/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace pitchvalue;

namespace {

Dataset line_data() {
    Dataset d(1);
    for (int i = 0; i < 20; ++i) {
        const double x = i * 0.5;
        d.add(std::vector<double>{x}, 2.0 * x + 1.0);
    }
    return d;
}

std::string saved(const Regressor& model, const nlohmann::json& meta = {{"note", "x"}}) {
    std::ostringstream out;
    save_model(out, model, meta);
    return out.str();
}

}  // namespace

TEST_CASE("linear regressor recovers an exact line") {
    LinearRegressor lin;
    lin.fit(line_data(), 1);
    CHECK(lin.weights()[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(lin.intercept() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(lin.predict(std::vector<double>{100.0}) == doctest::Approx(201.0).epsilon(1e-6));
    CHECK_FALSE(lin.intercept_only());
}

TEST_CASE("linear regressor falls back to the mean on constant features") {
    Dataset d(2);
    d.add(std::vector<double>{1.0, 1.0}, 2.0);
    d.add(std::vector<double>{1.0, 1.0}, 4.0);
    LinearRegressor lin;
    lin.fit(d, 1);
    CHECK(lin.intercept_only());
    CHECK(lin.predict(std::vector<double>{7.0, -3.0}) == doctest::Approx(3.0));
}

TEST_CASE("a deep forest without bootstrap memorizes distinct points") {
    ForestParams p;
    p.n_trees = 5;
    p.max_depth = 0;
    p.min_samples_leaf = 1;
    p.bootstrap = false;
    ForestRegressor forest(p);
    Dataset d(2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) d.add(std::vector<double>{u(rng), u(rng)}, u(rng));
    forest.fit(d, 7);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(forest.predict(d.row(i)) == doctest::Approx(d.y[i]));
}

TEST_CASE("property: forest predictions stay inside the target range") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Dataset d(3);
    for (int i = 0; i < 300; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        d.add(std::vector<double>{a, b, c}, std::sin(a) * b + 0.1 * c);
    }
    ForestParams p;
    p.n_trees = 20;
    p.feature_fraction = 0.5;
    ForestRegressor forest(p);
    forest.fit(d, 1);
    const auto [lo, hi] = std::minmax_element(d.y.begin(), d.y.end());
    for (int i = 0; i < 500; ++i) {
        const double v = forest.predict(std::vector<double>{3 * u(rng), 3 * u(rng), 3 * u(rng)});
        CHECK(v >= *lo);
        CHECK(v <= *hi);
    }
}

TEST_CASE("forest fits are deterministic per seed") {
    Dataset d(1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) d.add(std::vector<double>{u(rng)}, u(rng));
    ForestParams p;
    p.n_trees = 10;
    ForestRegressor a(p), b(p), c(p);
    a.fit(d, 11);
    b.fit(d, 11);
    c.fit(d, 12);
    CHECK(saved(a) == saved(b));
    CHECK(saved(a) != saved(c));
}

TEST_CASE("rmse") {
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
    CHECK(rmse(std::vector<double>{0}, std::vector<double>{3}) == 3.0);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
    CHECK_THROWS_AS(rmse(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST_CASE("table regressor memorizes means and returns 0 for unseen keys") {
    Dataset d(2);
    d.add(std::vector<double>{1, 2}, 1.0);
    d.add(std::vector<double>{1, 2}, 3.0);
    d.add(std::vector<double>{0, 0}, -1.0);
    TableRegressor table;
    table.fit(d, 0);
    CHECK(table.predict(std::vector<double>{1, 2}) == 2.0);
    CHECK(table.predict(std::vector<double>{0, 0}) == -1.0);
    CHECK(table.predict(std::vector<double>{5, 5}) == 0.0);
    CHECK(table.table().size() == 2);
    CHECK_THROWS_AS(table.predict(std::vector<double>{1}), Error);
}

TEST_CASE("dataset validation") {
    Dataset empty(2);
    CHECK_THROWS_AS(empty.validate(), Error);
    Dataset bad(1);
    bad.add(std::vector<double>{std::nan("")}, 1.0);
    CHECK_THROWS_AS(bad.validate(), Error);
    Dataset d(2);
    CHECK_THROWS_AS(d.add(std::vector<double>{1.0}, 1.0), Error);
}

TEST_CASE("forest parameters are validated") {
    ForestParams p;
    p.n_trees = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.min_samples_leaf = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.feature_fraction = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK(parse_regressor_kind("forest") == RegressorKind::Forest);
    CHECK_THROWS_AS(parse_regressor_kind("svm"), Error);
}

TEST_CASE("models round-trip through the file format") {
    const Dataset d = line_data();
    ForestParams p;
    p.n_trees = 4;
    std::vector<std::unique_ptr<Regressor>> models;
    models.push_back(std::make_unique<LinearRegressor>());
    models.push_back(std::make_unique<ForestRegressor>(p));
    models.push_back(std::make_unique<TableRegressor>());
    for (auto& m : models) {
        m->fit(d, 5);
        const std::string bytes = saved(*m);
        std::istringstream in(bytes);
        const auto loaded = load_model(in);
        CHECK(loaded.model->kind() == m->kind());
        CHECK(loaded.meta["note"] == "x");
        CHECK(saved(*loaded.model) == bytes);
        for (double x : {0.0, 1.3, 4.5, 9.5})
            CHECK(loaded.model->predict(std::vector<double>{x}) == m->predict(std::vector<double>{x}));
    }
}

TEST_CASE("corrupt model files are rejected") {
    LinearRegressor lin;
    lin.fit(line_data(), 1);
    const std::string bytes = saved(lin);

    std::istringstream magic("NOTAMODEL" + bytes.substr(9));
    CHECK_THROWS_AS(load_model(magic), Error);

    std::istringstream truncated(bytes.substr(0, bytes.size() - 4));
    CHECK_THROWS_AS(load_model(truncated), Error);

    std::istringstream header(bytes.substr(0, 20));
    CHECK_THROWS_AS(load_model(header), Error);

    CHECK_THROWS_AS(load_model(std::filesystem::path("/nonexistent/model.pvm")), Error);
}
