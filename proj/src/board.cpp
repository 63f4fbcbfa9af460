#include "pitchvalue/board.hpp"

#include "pitchvalue/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace pitchvalue {

void BoardQuery::validate(const FeatureSchema& schema) const {
    if (nx < 2 || ny < 2) throw Error("precondition", "grid resolution must be at least 2 x 2");
    if (nx > 2000 || ny > 2000) throw Error("precondition", "grid resolution above 2000 per axis");
    if (!(t >= 0.0 && t <= schema.half_length)) throw Error("precondition", "time outside the half");
    if (own < 0 || opp < 0) throw Error("precondition", "scores must be non-negative");
    if (std::find(schema.event_types.begin(), schema.event_types.end(), e) == schema.event_types.end()) {
        throw Error("schema", "event type " + std::string(event_type_code(e)) + " not in schema");
    }
}

Position cell_center(int i, int j, int nx, int ny, const PitchSpec& pitch) {
    return {(i + 0.5) * pitch.length / nx, (j + 0.5) * pitch.width / ny};
}

double point_value(const Regressor& model, const StateFeature& x, const FeatureSchema& schema) {
    return model.predict(encode(x, schema));
}

ValueGrid evaluate_grid(const Regressor& model, const BoardQuery& q, const FeatureSchema& schema) {
    q.validate(schema);
    if (model.dims() != schema.dims()) throw Error("schema", "model and schema dimensionality differ");
    ValueGrid g;
    g.query = q;
    g.nx = q.nx;
    g.ny = q.ny;
    g.values.resize(static_cast<std::size_t>(q.nx) * static_cast<std::size_t>(q.ny));
    StateFeature x{q.e, {}, q.t, q.own, q.opp, q.h};
    for (int j = 0; j < q.ny; ++j) {
        for (int i = 0; i < q.nx; ++i) {
            x.l = cell_center(i, j, q.nx, q.ny, schema.pitch);
            const double v = point_value(model, x, schema);
            g.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(q.nx) + static_cast<std::size_t>(i)] = v;
            g.M = std::max(g.M, std::abs(v));
        }
    }
    return g;
}

Rgb diverging_color(double v, double M) {
    if (!(M > 0.0)) return {255, 255, 255};
    const double s = std::clamp(v / M, -1.0, 1.0);
    const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(s))));
    if (s >= 0.0) return {255, fade, fade};
    return {fade, fade, 255};
}

Rgb Raster::pixel(int x, int y) const {
    const auto k = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
}

Raster render_heatmap(const ValueGrid& grid, int scale) {
    if (grid.nx < 1 || grid.ny < 1 || grid.values.empty()) throw Error("precondition", "empty grid");
    if (scale < 1) throw Error("precondition", "scale must be >= 1");
    Raster img;
    img.width = grid.nx * scale;
    img.height = grid.ny * scale;
    img.rgb.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3);
    for (int py = 0; py < img.height; ++py) {
        const int j = grid.ny - 1 - py / scale;
        for (int px = 0; px < img.width; ++px) {
            const Rgb c = diverging_color(grid.at(px / scale, j), grid.M);
            const auto k = (static_cast<std::size_t>(py) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(px)) * 3;
            img.rgb[k] = c.r;
            img.rgb[k + 1] = c.g;
            img.rgb[k + 2] = c.b;
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const Raster& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("io", "png: cannot create writer");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("io", "png: cannot create info");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("io", "png: encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t len) {
            auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            buf->insert(buf->end(), data, data + len);
        },
        nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
        auto* row = const_cast<png_bytep>(img.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) * 3);
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_png(const std::filesystem::path& path, const Raster& img) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("io", "write failed: " + path.string());
}

nlohmann::json grid_to_json(const ValueGrid& grid) {
    const auto& q = grid.query;
    return {
        {"query", {{"e", event_type_code(q.e)}, {"t", q.t}, {"own", q.own}, {"opp", q.opp}, {"h", side_name(q.h)}}},
        {"nx", grid.nx},
        {"ny", grid.ny},
        {"M", grid.M},
        {"values", grid.values},
    };
}

}  // namespace pitchvalue
