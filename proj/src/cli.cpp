#include "pitchvalue/cli.hpp"

#include "pitchvalue/artifacts.hpp"
#include "pitchvalue/error.hpp"
#include "pitchvalue/highlights.hpp"
#include "pitchvalue/pipeline.hpp"
#include "pitchvalue/service.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

namespace pitchvalue {

namespace fs = std::filesystem;

namespace {

// Flags that are parsed into typed values only after CLI11 is done.
struct Flags {
    std::string event = "FK";
    double t = 0.0;
    double x = 52.5;
    double y = 34.0;
    std::string score = "0:0";
    std::string side = "home";
    std::string regressor = "forest";
    std::optional<std::string> match;
    int top = 0;
    std::vector<int> cutoffs{10, 20, 30, 40};
    std::optional<double> penalty_conversion;
    fs::path report;
    fs::path heatmap_prefix = "heatmap";
    int scale = 4;
    std::vector<fs::path> models;
};

void error_line(std::ostream& err, const std::string& code, const std::string& message) {
    err << nlohmann::json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

bool creatable(const fs::path& dir) {
    std::error_code ec;
    fs::path p = fs::absolute(dir, ec);
    if (ec) return false;
    while (!p.empty()) {
        if (fs::exists(p, ec)) return fs::is_directory(p, ec);
        if (p == p.parent_path()) break;
        p = p.parent_path();
    }
    return false;
}

FeatureSchema schema_for(const PipelineConfig& cfg) {
    FeatureSchema s;
    s.pitch = cfg.pitch;
    s.half_length = cfg.half_length;
    s.score_difference = cfg.score_difference;
    s.validate();
    return s;
}

void run_simulate(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
    SeasonTemplate tmpl = cfg.season;
    tmpl.base.pitch = cfg.pitch;
    tmpl.base.half_length = cfg.half_length;
    if (f.penalty_conversion) {
        if (tmpl.base.conversion.empty()) tmpl.base.conversion = default_conversion_table();
        tmpl.base.conversion["penalty_kick"] = *f.penalty_conversion;
    }
    const Manifest m = simulate_season(tmpl, cfg.matches, cfg.data_dir);
    out << "simulated " << m.matches.size() << " matches into " << cfg.data_dir.string() << '\n'
        << "manifest checksum " << m.checksum << '\n';
}

void run_extract(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    std::size_t halves = 0, events = 0;
    for (const auto& dir : match_dirs(cfg.data_dir)) {
        for (int half = 1; half <= 2; ++half) {
            const auto frames_path = dir / half_file(half, "frames");
            if (!fs::exists(frames_path)) continue;
            const auto frames = parse_frames(frames_path, cfg.pitch);
            const auto raw = parse_events(dir / half_file(half, "events"));
            const std::string where = dir.filename().string() + " half " + std::to_string(half);
            if (frames.malformed_rows + frames.rejected_frames > 0) {
                err << "warning: " << where << ": skipped " << frames.malformed_rows << " malformed rows and "
                    << frames.rejected_frames << " invalid frames\n";
            }
            if (raw.malformed_rows > 0) {
                err << "warning: " << where << ": skipped " << raw.malformed_rows << " malformed event rows\n";
            }
            for (Team team : {Team::A, Team::B}) {
                Perspective view{team, frames.series.half_id, cfg.season.base.attack, cfg.pitch};
                const auto merged = extract_half(frames.series, raw.events, cfg.extraction, view);
                for (const auto& d : merged.diagnostics)
                    err << "warning: " << where << " team " << team_name(team) << ": " << d << '\n';
                write_significant_events(dir / significant_file(half, team), merged.events);
                events += merged.events.size();
            }
            ++halves;
        }
    }
    if (halves == 0) throw Error("io", "no match halves found under " + cfg.data_dir.string());
    out << "extracted " << events << " significant events from " << halves << " halves\n";
}

void run_highlights(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
    const HighlightIndex index = build_highlight_index(cfg.data_dir, cfg.extraction.detector, cfg.pitch, f.match);
    std::vector<HalfHighlights> all;
    for (const auto& [match, halves] : index) {
        for (const auto& h : halves) {
            auto write = [&](const std::vector<IntensePeriod>& ranked, const char* what) {
                std::vector<IntensePeriod> top = ranked;
                if (f.top > 0 && top.size() > static_cast<std::size_t>(f.top)) top.resize(static_cast<std::size_t>(f.top));
                const fs::path path = cfg.data_dir / match / half_file(h.half_id, what);
                std::ofstream file(path, std::ios::binary | std::ios::trunc);
                if (!file) throw Error("io", "cannot write " + path.string());
                write_highlights(file, top);
            };
            write(h.covariance, "highlights");
            write(h.speed, "highlights_speed");
            out << match << " half " << h.half_id << ": " << h.covariance.size() << " intense periods, "
                << h.speed.size() << " speed-baseline periods\n";
            all.push_back(h);
        }
    }
    const bool truth = std::any_of(all.begin(), all.end(), [](const HalfHighlights& h) { return h.truth.has_value(); });
    if (truth) write_recall_table(out, recall_table(all, f.cutoffs));
}

void run_train(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
    FviConfig fvi = cfg.fvi;
    fvi.regressor.kind = parse_regressor_kind(f.regressor);
    fvi.validate();
    const FeatureSchema schema = schema_for(cfg);
    const auto episodes = load_extracted_episodes(cfg.data_dir, cfg.half_length);
    const FviResult res = run_fvi(episodes, fvi, schema_featurizer(schema));
    save_model(cfg.model_path, *res.model, training_meta(schema, fvi, res, episodes.size()));

    fs::path report = f.report;
    if (report.empty()) report = fs::path(cfg.model_path).replace_extension(".report.csv");
    std::ofstream file(report, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("io", "cannot write " + report.string());
    write_training_report(file, res);

    out << "trained " << regressor_kind_name(fvi.regressor.kind) << " on " << res.train_episodes.size()
        << " episodes (" << res.valid_episodes.size() << " held out), " << res.iterations << " iterations"
        << (res.converged ? ", converged" : "") << '\n'
        << "validation rmse " << format_value(res.valid_rmse) << '\n'
        << "model " << cfg.model_path.string() << "\nreport " << report.string() << '\n';
}

void run_heatmap(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
    const ValueModel vm = load_value_model(cfg.model_path);
    BoardQuery q = cfg.board;
    q.e = require_event_type(f.event);
    q.t = f.t;
    std::tie(q.own, q.opp) = parse_score(f.score);
    q.h = require_side(f.side);
    q.validate(vm.schema);
    const ValueGrid grid = evaluate_grid(vm.model(), q, vm.schema);

    fs::path png = f.heatmap_prefix, json = f.heatmap_prefix;
    png += ".png";
    json += ".json";
    if (f.heatmap_prefix.has_parent_path()) fs::create_directories(f.heatmap_prefix.parent_path());
    write_png(png, render_heatmap(grid, f.scale));
    std::ofstream file(json, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("io", "cannot write " + json.string());
    file << grid_to_json(grid).dump() << '\n';
    out << "M " << format_value(grid.M) << '\n' << "image " << png.string() << '\n' << "grid " << json.string() << '\n';
}

QueryParams value_params(const Flags& f) {
    const auto [own, opp] = parse_score(f.score);
    return {{"event", f.event},
            {"t", format_value(f.t)},
            {"x", format_value(f.x)},
            {"y", format_value(f.y)},
            {"own", std::to_string(own)},
            {"opp", std::to_string(opp)},
            {"side", f.side}};
}

void run_value(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
    const Service svc(load_value_model(cfg.model_path));
    out << format_value(svc.value(value_params(f)).at("value").get<double>()) << '\n';
}

void run_serve(const PipelineConfig& cfg, std::ostream& out) {
    ValueModel vm = load_value_model(cfg.model_path);
    std::optional<HighlightIndex> index;
    if (fs::is_directory(cfg.data_dir)) index = build_highlight_index(cfg.data_dir, cfg.extraction.detector, cfg.pitch);
    const Service svc(std::move(vm), std::move(index));
    HttpServer http(svc);
    const int port = http.bind(cfg.bind, cfg.port);
    out << "listening on http://" << cfg.bind << ':' << port << std::endl;
    http.run();
}

void run_report(const Flags& f, std::ostream& out) {
    if (f.models.empty()) throw Error("precondition", "report needs at least one --model");
    struct Agg {
        std::size_t n = 0;
        double sum = 0.0, lo = INFINITY, hi = -INFINITY;
    };
    std::map<std::string, Agg> families;
    for (const auto& path : f.models) {
        const LoadedModel m = load_model(path);
        const auto& rmse = m.meta.contains("valid_rmse") ? m.meta.at("valid_rmse") : nlohmann::json();
        if (!rmse.is_number()) throw Error("precondition", path.string() + " has no validation rmse");
        const double v = rmse.get<double>();
        auto& a = families[m.meta.value("regressor", std::string(regressor_kind_name(m.model->kind())))];
        ++a.n;
        a.sum += v;
        a.lo = std::min(a.lo, v);
        a.hi = std::max(a.hi, v);
    }
    out << "family,models,mean_valid_rmse,min_valid_rmse,max_valid_rmse\n";
    char buf[160];
    for (const auto& [name, a] : families) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.6f\n", name.c_str(), a.n, a.sum / static_cast<double>(a.n),
                      a.lo, a.hi);
        out << buf;
    }
}

}  // namespace

void PipelineConfig::validate() const {
    pitch.validate();
    if (!(half_length > 0.0)) throw Error("precondition", "half length must be positive");
    if (matches < 1) throw Error("precondition", "need at least one match");
    extraction.validate();
    fvi.validate();
    if (port < 0 || port > 65535) throw Error("precondition", "port out of range");
    for (const auto& dir : {data_dir, out_dir}) {
        if (!creatable(dir)) throw Error("io", "directory cannot be created: " + dir.string());
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg;
    Flags f;
    CLI::App app{"Value significant events in simulated or tracked matches", "pitchvalue"};
    app.set_config("--config", "", "TOML config file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.add_option("--pitch-length", cfg.pitch.length, "Pitch length in meters")->capture_default_str();
    app.add_option("--pitch-width", cfg.pitch.width, "Pitch width in meters")->capture_default_str();
    app.add_option("--half-length", cfg.half_length, "Half duration in seconds")->capture_default_str();

    auto& sim = cfg.season;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic season with ground truth");
    simulate->add_option("--out,--data", cfg.data_dir, "Dataset root")->capture_default_str();
    simulate->add_option("--matches", cfg.matches, "Number of matches")->capture_default_str();
    simulate->add_option("--seed", sim.base.seed, "Master seed")->capture_default_str();
    simulate->add_option("--windows", sim.windows_per_half, "Planted intense windows per half")->capture_default_str();
    simulate->add_option("--stoppages", sim.stoppages_per_half, "Scheduled stoppages per half")->capture_default_str();
    simulate->add_option("--frame-rate", sim.base.frame_rate, "Tracking frame rate in Hz")->capture_default_str();
    simulate->add_option("--penalty-conversion", f.penalty_conversion, "Goal probability after a penalty kick");

    auto add_detector = [&](CLI::App* cmd) {
        cmd->add_option("--N,--half-window", cfg.extraction.detector.half_window, "Detector half window N in seconds")
            ->capture_default_str();
    };

    auto* extract = app.add_subcommand("extract", "Write significant-event files for every half");
    extract->add_option("--data", cfg.data_dir, "Dataset root")->capture_default_str();
    extract->add_option("--reset-threshold", cfg.extraction.reset_threshold, "Minimum dead time in seconds")
        ->capture_default_str();
    add_detector(extract);

    auto* highlights = app.add_subcommand("highlights", "Rank intense periods and score them against ground truth");
    highlights->add_option("--data", cfg.data_dir, "Dataset root")->capture_default_str();
    highlights->add_option("--match", f.match, "Only this match id");
    highlights->add_option("--top", f.top, "Keep the top K periods in the written files (0 keeps all)");
    highlights->add_option("--cutoffs", f.cutoffs, "Rank cutoffs for the recall table")->delimiter(',')->capture_default_str();
    add_detector(highlights);

    auto& forest = cfg.fvi.regressor.forest;
    auto* train = app.add_subcommand("train", "Fit the value model with fitted-value iteration");
    train->add_option("--data", cfg.data_dir, "Dataset root")->capture_default_str();
    train->add_option("--model", cfg.model_path, "Output model file")->capture_default_str();
    train->add_option("--report", f.report, "Training report (default: next to the model)");
    train->add_option("--regressor", f.regressor, "forest, linear or table")->capture_default_str();
    train->add_option("--trees", forest.n_trees, "Forest size")->capture_default_str();
    train->add_option("--max-depth", forest.max_depth, "Tree depth limit (0: none)")->capture_default_str();
    train->add_option("--min-leaf", forest.min_samples_leaf, "Minimum rows per leaf")->capture_default_str();
    train->add_option("--feature-fraction", forest.feature_fraction, "Share of features tried per split")
        ->capture_default_str();
    train->add_flag("--bootstrap,!--no-bootstrap", forest.bootstrap, "Bootstrap rows per tree");
    train->add_option("--iterations", cfg.fvi.max_iterations, "Maximum FVI iterations")->capture_default_str();
    train->add_option("--tolerance", cfg.fvi.tolerance, "Stop when max |dv| falls below this")->capture_default_str();
    train->add_option("--gamma", cfg.fvi.gamma, "Discount factor")->capture_default_str();
    train->add_option("--train-fraction", cfg.fvi.train_fraction, "Share of episodes used for fitting")
        ->capture_default_str();
    train->add_option("--seed", cfg.fvi.seed, "Split and fit seed")->capture_default_str();
    train->add_flag("--score-difference", cfg.score_difference, "Encode the score as own - opp");

    auto add_state = [&](CLI::App* cmd) {
        cmd->add_option("--model", cfg.model_path, "Model file")->capture_default_str();
        cmd->add_option("--event", f.event, "Event type code (IN, KO, TI, FK, IFK, CK, PK, *_OPP)")
            ->capture_default_str();
        cmd->add_option("--time,-t", f.t, "Seconds since the half started")->capture_default_str();
        cmd->add_option("--score", f.score, "own:opp")->capture_default_str();
        cmd->add_option("--side", f.side, "home or away")->capture_default_str();
    };

    auto* heatmap = app.add_subcommand("heatmap", "Render a board evaluation as PNG plus grid export");
    add_state(heatmap);
    heatmap->add_option("--nx", cfg.board.nx, "Cells along the length")->capture_default_str();
    heatmap->add_option("--ny", cfg.board.ny, "Cells along the width")->capture_default_str();
    heatmap->add_option("--scale", f.scale, "Pixels per cell")->capture_default_str();
    heatmap->add_option("--out", f.heatmap_prefix, "Output prefix for .png and .json")->capture_default_str();

    auto* value = app.add_subcommand("value", "Print the value of one state");
    add_state(value);
    value->add_option("--x", f.x, "Attack-normalized x in meters")->capture_default_str();
    value->add_option("--y", f.y, "Attack-normalized y in meters")->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Serve the model and highlights over HTTP");
    serve->add_option("--model", cfg.model_path, "Model file")->capture_default_str();
    serve->add_option("--data", cfg.data_dir, "Dataset root for /highlights")->capture_default_str();
    serve->add_option("--bind", cfg.bind, "Bind address")->capture_default_str();
    serve->add_option("--port", cfg.port, "Port (0 picks a free one)")->capture_default_str();
    add_detector(serve);

    auto* report = app.add_subcommand("report", "Aggregate validation RMSE per model family");
    report->add_option("--model", f.models, "Model files")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        error_line(err, "usage", e.what());
        return 2;
    }

    try {
        cfg.validate();
        if (simulate->parsed()) run_simulate(cfg, f, out);
        else if (extract->parsed()) run_extract(cfg, out, err);
        else if (highlights->parsed()) run_highlights(cfg, f, out);
        else if (train->parsed()) run_train(cfg, f, out);
        else if (heatmap->parsed()) run_heatmap(cfg, f, out);
        else if (value->parsed()) run_value(cfg, f, out);
        else if (serve->parsed()) run_serve(cfg, out);
        else if (report->parsed()) run_report(f, out);
        return 0;
    } catch (const Error& e) {
        error_line(err, e.code(), e.what());
    } catch (const std::exception& e) {
        error_line(err, "internal", e.what());
    }
    return 1;
}

}  // namespace pitchvalue
