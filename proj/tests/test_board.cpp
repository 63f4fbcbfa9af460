#include "doctest.h"

#include "pitchvalue/board.hpp"
#include "pitchvalue/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace pitchvalue;

namespace {

// Regressor defined by a function of the encoded features.
class FunctionModel final : public Regressor {
public:
    FunctionModel(std::size_t dims, std::function<double(std::span<const double>)> f) : dims_(dims), f_(std::move(f)) {}
    RegressorKind kind() const override { return RegressorKind::Linear; }
    void fit(const Dataset&, std::uint64_t) override {}
    double predict(std::span<const double> x) const override { return f_(x); }
    std::size_t dims() const override { return dims_; }
    void write_payload(std::ostream&) const override {}
    void read_payload(std::istream&) override {}

private:
    std::size_t dims_;
    std::function<double(std::span<const double>)> f_;
};

// Features 13 and 14 are x / length and y / width in the default schema.
FunctionModel attack_gradient(const FeatureSchema& schema, double scale = 1.0) {
    return FunctionModel(schema.dims(), [scale](std::span<const double> x) { return scale * (x[13] - 0.5); });
}

std::size_t argmax(const ValueGrid& g) {
    return static_cast<std::size_t>(std::max_element(g.values.begin(), g.values.end()) - g.values.begin());
}

}  // namespace

TEST_CASE("constant model gives a flat grid") {
    const FeatureSchema schema;
    const FunctionModel model(schema.dims(), [](std::span<const double>) { return 0.25; });
    BoardQuery q;
    q.nx = 10;
    q.ny = 7;
    const auto g = evaluate_grid(model, q, schema);
    CHECK(g.values.size() == 70);
    CHECK(std::all_of(g.values.begin(), g.values.end(), [](double v) { return v == 0.25; }));
    CHECK(g.M == 0.25);
}

TEST_CASE("table model with one stored cell") {
    const FeatureSchema schema;
    BoardQuery q;
    q.nx = 2;
    q.ny = 2;
    StateFeature x{q.e, cell_center(0, 0, 2, 2, schema.pitch), q.t, 0, 0, Side::Home};
    CHECK(x.l == Position{26.25, 17.0});
    Dataset d(schema.dims());
    d.add(encode(x, schema), 1.0);
    TableRegressor table;
    table.fit(d, 0);
    const auto g = evaluate_grid(table, q, schema);
    CHECK(g.values == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    CHECK(g.M == 1.0);
}

TEST_CASE("antisymmetric surface renders blue on the left, red on the right") {
    const FeatureSchema schema;
    const auto model = attack_gradient(schema);
    BoardQuery q;
    q.nx = 4;
    q.ny = 2;
    const auto g = evaluate_grid(model, q, schema);
    CHECK(g.at(0, 0) == doctest::Approx(-0.375));
    CHECK(g.at(3, 1) == doctest::Approx(0.375));
    CHECK(g.M == doctest::Approx(0.375));

    const auto img = render_heatmap(g, 3);
    CHECK(img.width == 12);
    CHECK(img.height == 6);
    CHECK(img.pixel(0, 0) == Rgb{0, 0, 255});
    CHECK(img.pixel(11, 5) == Rgb{255, 0, 0});
    const Rgb mid = img.pixel(4, 0);  // cell 1, value -0.125
    CHECK(mid.b == 255);
    CHECK(mid.r == mid.g);
}

TEST_CASE("rows run top to bottom from y = width") {
    const FeatureSchema schema;
    const FunctionModel model(schema.dims(), [](std::span<const double> x) { return x[14]; });
    BoardQuery q;
    q.nx = 2;
    q.ny = 2;
    const auto img = render_heatmap(evaluate_grid(model, q, schema), 1);
    CHECK(img.pixel(0, 0) == Rgb{255, 0, 0});  // y near width is the hottest
    CHECK(img.pixel(0, 1).r == 255);
    CHECK(img.pixel(0, 1).g > 0);
}

TEST_CASE("diverging palette") {
    CHECK(diverging_color(0.0, 1.0) == Rgb{255, 255, 255});
    CHECK(diverging_color(1.0, 1.0) == Rgb{255, 0, 0});
    CHECK(diverging_color(-1.0, 1.0) == Rgb{0, 0, 255});
    CHECK(diverging_color(5.0, 1.0) == Rgb{255, 0, 0});
    CHECK(diverging_color(0.3, 0.0) == Rgb{255, 255, 255});
}

TEST_CASE("property: scaling values never moves the hottest cell") {
    const FeatureSchema schema;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u(rng), b = u(rng), c = u(rng);
        auto f = [=](std::span<const double> x) { return a * std::sin(5 * x[13]) + b * x[14] * x[13] + c; };
        const FunctionModel base(schema.dims(), f);
        const FunctionModel scaled(schema.dims(), [=](std::span<const double> x) { return 7.5 * f(x); });
        BoardQuery q;
        q.nx = 21;
        q.ny = 13;
        const auto g1 = evaluate_grid(base, q, schema);
        const auto g2 = evaluate_grid(scaled, q, schema);
        CHECK(argmax(g1) == argmax(g2));
        const auto i = static_cast<int>(argmax(g1)) % q.nx, j = static_cast<int>(argmax(g1)) / q.nx;
        CHECK(diverging_color(g1.at(i, j), g1.M) == diverging_color(g2.at(i, j), g2.M));
    }
}

TEST_CASE("point_value equals its grid cell bit for bit") {
    FeatureSchema schema;
    Dataset d(schema.dims());
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ux(0.0, 105.0), uy(0.0, 68.0), ut(0.0, 2700.0);
    for (int i = 0; i < 400; ++i) {
        StateFeature x{EventType::FreeKickDirect, {ux(rng), uy(rng)}, ut(rng), 0, 0, Side::Home};
        d.add(encode(x, schema), std::sin(x.l.x / 20.0) + x.l.y / 68.0);
    }
    ForestParams p;
    p.n_trees = 10;
    ForestRegressor forest(p);
    forest.fit(d, 3);
    BoardQuery q;
    q.t = 1000.0;
    q.own = 1;
    q.nx = 26;
    q.ny = 17;
    const auto g = evaluate_grid(forest, q, schema);
    for (int j = 0; j < q.ny; ++j)
        for (int i = 0; i < q.nx; ++i) {
            const StateFeature x{q.e, cell_center(i, j, q.nx, q.ny, schema.pitch), q.t, q.own, q.opp, q.h};
            CHECK(point_value(forest, x, schema) == g.at(i, j));
        }
}

TEST_CASE("PNG encoding is deterministic") {
    const FeatureSchema schema;
    const auto model = attack_gradient(schema, 2.0);
    BoardQuery q;
    q.nx = 30;
    q.ny = 20;
    const auto a = encode_png(render_heatmap(evaluate_grid(model, q, schema)));
    const auto b = encode_png(render_heatmap(evaluate_grid(model, q, schema)));
    CHECK(a == b);
    REQUIRE(a.size() > 8);
    CHECK(a[1] == 'P');
    CHECK(a[2] == 'N');
    CHECK(a[3] == 'G');
}

TEST_CASE("grid json and query validation") {
    const FeatureSchema schema;
    const auto model = attack_gradient(schema);
    BoardQuery q;
    q.nx = 3;
    q.ny = 2;
    const auto j = grid_to_json(evaluate_grid(model, q, schema));
    CHECK(j["values"].size() == 6);
    CHECK(j["query"]["e"] == "FK");
    CHECK(j["query"]["h"] == "home");

    BoardQuery bad = q;
    bad.nx = 1;
    CHECK_THROWS_AS(evaluate_grid(model, bad, schema), Error);
    bad = q;
    bad.t = 5000.0;
    CHECK_THROWS_AS(evaluate_grid(model, bad, schema), Error);
    bad = q;
    bad.own = -1;
    CHECK_THROWS_AS(evaluate_grid(model, bad, schema), Error);
    const FunctionModel narrow(3, [](std::span<const double>) { return 0.0; });
    CHECK_THROWS_AS(evaluate_grid(narrow, q, schema), Error);
    CHECK_THROWS_AS(render_heatmap(evaluate_grid(model, q, schema), 0), Error);
}
