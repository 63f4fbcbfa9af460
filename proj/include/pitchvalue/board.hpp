#pragma once

#include "pitchvalue/chain.hpp"
#include "pitchvalue/regressors.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pitchvalue {

struct BoardQuery {
    EventType e = EventType::FreeKickDirect;
    double t = 0.0;
    int own = 0;
    int opp = 0;
    Side h = Side::Home;
    int nx = 105;
    int ny = 68;

    void validate(const FeatureSchema& schema) const;
};

// values[j * nx + i] is the cell whose center is ((i + 0.5) L / nx,
// (j + 0.5) W / ny); j counts up from y = 0.
struct ValueGrid {
    BoardQuery query;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
    double M = 0.0;  // max |value|

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)]; }
};

Position cell_center(int i, int j, int nx, int ny, const PitchSpec& pitch);

ValueGrid evaluate_grid(const Regressor& model, const BoardQuery& q, const FeatureSchema& schema);
double point_value(const Regressor& model, const StateFeature& x, const FeatureSchema& schema);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Blue at -M, white at 0, red at +M, linear in v / M. M = 0 maps to white.
Rgb diverging_color(double v, double M);

// RGB raster with offense left to right and y = width on the top row; each
// cell becomes a scale x scale block.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Rgb pixel(int x, int y) const;
};

Raster render_heatmap(const ValueGrid& grid, int scale = 4);
std::vector<std::uint8_t> encode_png(const Raster& img);
void write_png(const std::filesystem::path& path, const Raster& img);

// {"query": {"e", "t", "own", "opp", "h"}, "nx", "ny", "M", "values"}.
nlohmann::json grid_to_json(const ValueGrid& grid);

}  // namespace pitchvalue
