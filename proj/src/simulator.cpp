#include "pitchvalue/simulator.hpp"

#include "pitchvalue/error.hpp"
#include "pitchvalue/intensity.hpp"
#include "text_util.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace pitchvalue {

namespace {

// Motion model constants. Positions are expressed on a 105 x 68 reference
// pitch and scaled to the configured dimensions.
constexpr int kPlayersPerTeam = 11;
constexpr std::array<Position, kPlayersPerTeam> kFormation{{
    {5, 34},                                   // goalkeeper
    {22, 10}, {20, 26}, {20, 42}, {22, 58},    // defence
    {38, 10}, {36, 26}, {36, 42}, {38, 58},    // midfield
    {50, 24}, {50, 44},                        // attack
}};

constexpr double kJitterTheta = 0.4;   // 1/s, mean reversion of individual deviations
constexpr double kJitterSigma = 0.35;  // m/sqrt(s)
constexpr double kBlockTheta = 0.02;
constexpr double kBlockSigma = 0.5;
constexpr double kBlockMax = 17.0;     // max common x shift of both formations
constexpr double kBlockFollow = 0.4;   // 1/s, relaxation toward the ball in dead balls / windows
constexpr double kBallGain = 1.8;      // ball x offset per metre of block shift
constexpr double kTransitionLength = 6.0;  // out and back
constexpr double kTransitionSpacing = 12.0;
constexpr double kReleaseRamp = 40.0;  // shape recovery after a window
constexpr double kClusterRadius = 12.0;
constexpr double kClusterSpin = 0.05;  // rad/s
constexpr double kWindowBallSigma = 1.0;

struct Interval {
    double a = 0.0, b = 0.0;
    bool contains(double t) const { return t >= a && t < b; }
};

struct DeadSpell {
    Interval span;
    Position ball;
};

struct WindowPlan {
    PlantedWindow window;
    Team attacker = Team::A;
    Position center;
};

struct Transition {
    double start = 0.0;
    double sign = 1.0;
};

struct Timeline {
    std::vector<WindowPlan> windows;
    std::vector<DeadSpell> dead_balls;
    std::vector<Interval> freezes;
    std::vector<Transition> transitions;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    double normal() { return normal_(gen_); }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }
    Team team() { return uniform(0.0, 1.0) < 0.5 ? Team::A : Team::B; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double round_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

// Location in `team`'s attack frame converted to pitch-absolute coordinates.
Position absolute(Position attack_frame, Team team, const SimulatorConfig& cfg) {
    return normalize_to_attack_frame(attack_frame, team, cfg.half_id, cfg.attack, cfg.pitch);
}

Position restart_location(EventKind kind, Team team, Rng& rng, const SimulatorConfig& cfg) {
    const double L = cfg.pitch.length, W = cfg.pitch.width;
    const double sx = L / 105.0, sy = W / 68.0;
    Position p;
    switch (kind) {
        case EventKind::ThrowIn: p = {rng.uniform(5, 100) * sx, rng.coin(0.5) ? 0.0 : W}; break;
        case EventKind::CornerKick: p = {L, rng.coin(0.5) ? 0.0 : W}; break;
        case EventKind::PenaltyKick: p = {L - 11.0 * sx, W / 2}; break;
        case EventKind::FreeKickDirect: p = {rng.uniform(70, 85) * sx, rng.uniform(15, 53) * sy}; break;
        case EventKind::FreeKickIndirect: p = {rng.uniform(40, 80) * sx, rng.uniform(5, 63) * sy}; break;
        default: p = {L / 2, W / 2}; break;
    }
    return absolute(p, team, cfg);
}

RawEvent make_event(double t, EventKind kind, std::optional<Team> team, Position loc) {
    RawEvent e;
    e.t = t;
    e.kind = kind;
    e.label = std::string(event_kind_name(kind));
    e.team = team;
    e.location = loc;
    return e;
}

struct Trigger {
    double t;
    std::string key;
    Team team;
    int window = -1;  // index into Timeline::windows, or -1
};

bool in_any(const std::vector<Interval>& v, double t) {
    return std::any_of(v.begin(), v.end(), [t](const Interval& i) { return i.contains(t); });
}

// Events, ground truth and the phase timeline; consumes only `rng`.
Timeline plan_timeline(const SimulatorConfig& cfg, Rng& rng, std::vector<RawEvent>& events,
                       GroundTruth& truth) {
    Timeline tl;
    const double L = cfg.pitch.length, W = cfg.pitch.width;
    const Position center{L / 2, W / 2};
    const Team first = cfg.half_id == 1 ? Team::A : Team::B;

    events.push_back(make_event(0.0, EventKind::Kickoff, first, center));
    tl.freezes.push_back({0.0, cfg.restart_settle});

    std::vector<Trigger> triggers;
    for (const auto& w : cfg.windows) {
        WindowPlan wp;
        wp.window = w;
        wp.attacker = rng.team();
        const double sx = L / 105.0, sy = W / 68.0;
        wp.center = absolute({L - rng.uniform(10, 22) * sx, W / 2 + rng.uniform(-15, 15) * sy},
                             wp.attacker, cfg);
        tl.windows.push_back(wp);
        triggers.push_back({w.end(), kInPlayKey, wp.attacker,
                            static_cast<int>(tl.windows.size()) - 1});
    }
    for (const auto& s : cfg.stoppages) {
        const Team team = s.team ? *s.team : rng.team();
        const Position loc = restart_location(s.restart, team, rng, cfg);
        const bool foul = s.restart == EventKind::FreeKickDirect ||
                          s.restart == EventKind::FreeKickIndirect ||
                          s.restart == EventKind::PenaltyKick;
        events.push_back(make_event(s.t, foul ? EventKind::Foul : EventKind::OutOfBounds,
                                    opponent(team), loc));
        events.push_back(make_event(s.restart_time(), s.restart, team, loc));
        tl.dead_balls.push_back({{s.t, s.restart_time()}, loc});
        tl.freezes.push_back({s.restart_time(), s.restart_time() + cfg.restart_settle});
        triggers.push_back({s.restart_time(), std::string(event_kind_name(s.restart)), team});
    }
    std::stable_sort(triggers.begin(), triggers.end(),
                     [](const Trigger& a, const Trigger& b) { return a.t < b.t; });

    for (const auto& tr : triggers) {
        const double p = cfg.probability(tr.key);
        const bool scored = rng.coin(p);
        const double delay = rng.uniform(SimulatorConfig::kGoalDelayMin, SimulatorConfig::kGoalDelayMax);
        truth.triggers.push_back({tr.t, tr.key, tr.team, p});
        if (!scored) continue;
        const double g = tr.t + delay;
        events.push_back(make_event(g, EventKind::Goal, tr.team, absolute({L, W / 2}, tr.team, cfg)));
        truth.goals.push_back({g, tr.team});
        const double ko = g + cfg.kickoff_delay;
        tl.dead_balls.push_back({{g, ko}, center});
        events.push_back(make_event(ko, EventKind::Kickoff, opponent(tr.team), center));
        tl.freezes.push_back({ko, ko + cfg.restart_settle});
    }
    events.push_back(make_event(cfg.half_length, EventKind::HalfEnd, std::nullopt, center));
    std::stable_sort(events.begin(), events.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.t < b.t; });
    std::sort(truth.goals.begin(), truth.goals.end(),
              [](const GoalRecord& a, const GoalRecord& b) { return a.t < b.t; });
    truth.windows = cfg.windows;

    // Block transitions only in open play away from windows.
    auto calm = [&](double a, double b) {
        for (double t = a; t <= b; t += 0.5) {
            if (in_any(tl.freezes, t)) return false;
            for (const auto& d : tl.dead_balls)
                if (d.span.contains(t)) return false;
            for (const auto& w : tl.windows)
                if (t >= w.window.start - 2.0 && t < w.window.end() + kReleaseRamp + 2.0) return false;
        }
        return true;
    };
    const int wanted = std::max(0, cfg.block_transitions);
    for (int attempt = 0; attempt < 60 * wanted && static_cast<int>(tl.transitions.size()) < wanted;
         ++attempt) {
        const double s = rng.uniform(0.0, cfg.half_length - kTransitionLength - 1.0);
        const double sign = rng.coin(0.5) ? 1.0 : -1.0;
        if (!calm(s, s + kTransitionLength)) continue;
        bool spaced = std::all_of(tl.transitions.begin(), tl.transitions.end(), [&](const Transition& o) {
            return std::abs(o.start - s) >= kTransitionSpacing;
        });
        if (spaced) tl.transitions.push_back({s, sign});
    }
    std::sort(tl.transitions.begin(), tl.transitions.end(),
              [](const Transition& a, const Transition& b) { return a.start < b.start; });
    return tl;
}

FrameSeries generate_frames(const SimulatorConfig& cfg, const Timeline& tl, Rng& rng) {
    const double L = cfg.pitch.length, W = cfg.pitch.width;
    const double sx = L / 105.0, sy = W / 68.0;
    const double cx = L / 2, cy = W / 2;
    const double dt = 1.0 / cfg.frame_rate;
    const double sqdt = std::sqrt(dt);
    const double block_max = kBlockMax * sx;

    FrameSeries fs;
    fs.half_id = cfg.half_id;
    fs.match_id = cfg.match_id;
    fs.frame_rate = cfg.frame_rate;

    struct Player {
        Team team;
        int id;
        bool gk;
        Position anchor;  // absolute, with zero block shift
        Position dev;
        double angle = 0.0;
        double spin = 0.0;
        double reach = 1.0;
    };
    std::vector<Player> players;
    for (Team team : {Team::A, Team::B}) {
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            Position a{kFormation[i].x * sx, kFormation[i].y * sy};
            players.push_back({team, i + 1, i == 0, absolute(a, team, cfg), {}, 0.0, 0.0, 1.0});
        }
    }

    double block = 0.0;
    Position ball_dev{0.0, 0.0};
    Position ball{cx, cy};
    Position cluster{cx, cy};
    int active_window = -1;
    std::size_t next_transition = 0;
    double transition_from = 0.0, transition_to = 0.0;

    const auto n_frames = static_cast<std::size_t>(std::floor(cfg.half_length * cfg.frame_rate + 1e-9)) + 1;
    fs.frames.reserve(n_frames);

    for (std::size_t k = 0; k < n_frames; ++k) {
        const double t = static_cast<double>(k) / cfg.frame_rate;
        if (k > 0 && in_any(tl.freezes, t)) {
            Frame f = fs.frames.back();
            f.t = t;
            fs.frames.push_back(std::move(f));
            continue;
        }

        const DeadSpell* dead = nullptr;
        for (const auto& d : tl.dead_balls)
            if (d.span.contains(t)) dead = &d;

        // Contraction weight of the current (or just finished) window.
        double weight = 0.0;
        const WindowPlan* win = nullptr;
        for (std::size_t i = 0; i < tl.windows.size(); ++i) {
            const auto& w = tl.windows[i];
            if (t < w.window.start || t >= w.window.end() + kReleaseRamp) continue;
            win = &w;
            if (active_window != static_cast<int>(i)) {
                active_window = static_cast<int>(i);
                for (auto& p : players) {
                    p.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    p.spin = rng.uniform(-kClusterSpin, kClusterSpin);
                    p.reach = rng.uniform(0.6, 1.2);
                }
            }
            // The area scales roughly with (1 - weight)^4: it shrinks like
            // (1 - u)^2 across the window and recovers linearly afterwards.
            if (t < w.window.end()) {
                weight = 1.0 - std::sqrt(1.0 - (t - w.window.start) / w.window.duration);
            } else {
                weight = 1.0 - std::pow((t - w.window.end()) / kReleaseRamp, 0.25);
            }
        }
        const bool window_live = win && t < win->window.end();

        // Block shift.
        while (next_transition < tl.transitions.size() &&
               tl.transitions[next_transition].start + kTransitionLength <= t) {
            ++next_transition;
        }
        const Transition* tr = nullptr;
        if (next_transition < tl.transitions.size() && tl.transitions[next_transition].start <= t) {
            tr = &tl.transitions[next_transition];
        }
        if (tr) {
            if (t - tr->start < dt) {
                transition_from = block;
                transition_to = tr->sign * block_max;
                if (std::abs(transition_to - transition_from) < block_max) transition_to = -transition_to;
            }
            // Triangle profile: to the far side and back.
            const double u = std::clamp((t - tr->start + dt) / kTransitionLength, 0.0, 1.0);
            const double reach = 1.0 - std::abs(2.0 * u - 1.0);
            block = transition_from + (transition_to - transition_from) * reach;
        } else if (dead || window_live) {
            const Position target = dead ? dead->ball : win->center;
            const double want = std::clamp((target.x - cx) / kBallGain, -block_max, block_max);
            block += kBlockFollow * (want - block) * dt;
        } else {
            block += -kBlockTheta * block * dt + kBlockSigma * sqdt * rng.normal();
            block = std::clamp(block, -block_max, block_max);
        }

        // Ball.
        if (dead) {
            ball = dead->ball;
        } else if (window_live) {
            ball_dev.x += -0.5 * ball_dev.x * dt + kWindowBallSigma * sqdt * rng.normal();
            ball_dev.y += -0.5 * ball_dev.y * dt + kWindowBallSigma * sqdt * rng.normal();
            ball = {win->center.x + ball_dev.x, win->center.y + ball_dev.y};
            cluster = ball;
        } else {
            ball_dev.x += -0.3 * ball_dev.x * dt + 3.0 * sqdt * rng.normal();
            ball_dev.y += -0.05 * ball_dev.y * dt + 3.0 * sqdt * rng.normal();
            ball = {cx + kBallGain * block + ball_dev.x, cy + ball_dev.y};
        }
        ball = clamp(ball, cfg.pitch);

        const double radius = kClusterRadius * sx;

        Frame f;
        f.t = t;
        f.players.reserve(players.size());
        for (auto& p : players) {
            const double sig = p.gk ? 0.3 * kJitterSigma : kJitterSigma;
            p.dev.x += -kJitterTheta * p.dev.x * dt + sig * sqdt * rng.normal();
            p.dev.y += -kJitterTheta * p.dev.y * dt + sig * sqdt * rng.normal();
            Position pos{p.anchor.x + p.dev.x, p.anchor.y + p.dev.y};
            if (!p.gk) {
                pos.x += block;
                if (weight > 0.0) {
                    p.angle += p.spin * dt;
                    const Position c{cluster.x + radius * p.reach * std::cos(p.angle),
                                     cluster.y + radius * p.reach * std::sin(p.angle)};
                    pos = {(1.0 - weight) * pos.x + weight * c.x, (1.0 - weight) * pos.y + weight * c.y};
                }
            }
            pos = clamp(pos, cfg.pitch);
            f.players.push_back({p.team, p.id, {round_mm(pos.x), round_mm(pos.y)}, p.gk});
        }
        f.ball = {round_mm(ball.x), round_mm(ball.y)};
        fs.frames.push_back(std::move(f));
    }
    return fs;
}

}  // namespace

double SimulatorConfig::probability(const std::string& key) const {
    auto it = conversion.find(key);
    return it == conversion.end() ? 0.0 : it->second;
}

void SimulatorConfig::validate() const {
    pitch.validate();
    if (frame_rate < kMinFrameRate || frame_rate > kMaxFrameRate) {
        throw Error("precondition", "frame rate outside [15, 30] Hz");
    }
    if (!(half_length > 0.0)) throw Error("precondition", "half length must be positive");
    if (half_id != 1 && half_id != 2) throw Error("precondition", "half id must be 1 or 2");
    for (const auto& [k, p] : conversion) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("precondition", "conversion probability for " + k + " outside [0, 1]");
    }
    std::vector<PlantedWindow> ws = windows;
    std::sort(ws.begin(), ws.end(), [](auto& a, auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (!(ws[i].duration > 0.0) || ws[i].start < 0.0 || ws[i].end() > half_length) {
            throw Error("precondition", "window outside half");
        }
        if (i > 0 && ws[i].start < ws[i - 1].end()) throw Error("precondition", "overlapping windows");
    }

    // Every scheduled item reserves the time its possible goal, the kickoff
    // and the settle period need.
    struct Span { double a, b; };
    std::vector<Span> spans;
    const double reserve = reserved_after_trigger();
    for (const auto& w : ws) spans.push_back({w.start, w.end() + reserve});
    for (const auto& s : stoppages) {
        if (!is_restart(s.restart) || s.restart == EventKind::Kickoff) {
            throw Error("precondition", "stoppage restart must be a set piece");
        }
        if (!(s.duration > 0.0) || s.t < 0.0) throw Error("precondition", "invalid stoppage");
        spans.push_back({s.t, s.restart_time() + reserve});
    }
    std::sort(spans.begin(), spans.end(), [](auto& a, auto& b) { return a.a < b.a; });
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].a < restart_settle) throw Error("precondition", "schedule overlaps the opening kickoff");
        if (spans[i].b > half_length) throw Error("precondition", "schedule runs past the end of the half");
        if (i > 0 && spans[i].a < spans[i - 1].b) {
            throw Error("precondition", "overlapping schedule: items closer than the reserved goal/kickoff span");
        }
    }
}

std::map<std::string, double> default_conversion_table() {
    return {
        {"penalty_kick", 0.75},       {"free_kick_direct", 0.06}, {"free_kick_indirect", 0.03},
        {"corner_kick", 0.03},        {"throw_in", 0.01},         {"kickoff", 0.0},
        {kInPlayKey, 0.05},
    };
}

SimulatedHalf simulate_half(const SimulatorConfig& cfg) {
    cfg.validate();
    SimulatedHalf out;
    Rng plan_rng(derive_seed(cfg.seed, 0x706c616e));
    Timeline tl = plan_timeline(cfg, plan_rng, out.events, out.truth);
    Rng motion_rng(derive_seed(cfg.seed, 0x6d6f7665));
    out.frames = generate_frames(cfg, tl, motion_rng);
    if (!cfg.windows.empty()) {
        const double ratio = planted_contrast(out.frames, cfg.windows);
        if (!(ratio < kPlantedContrastMax)) {
            throw Error("internal", "planted windows do not contract the players enough");
        }
    }
    return out;
}

double planted_contrast(const FrameSeries& frames, const std::vector<PlantedWindow>& windows) {
    const DetectorConfig dc;
    double in = 0.0, out = 0.0;
    int n_in = 0, n_out = 0;
    const double t0 = frames.start_time(), t1 = frames.end_time();
    for (double t = t0; t <= t1 + 1e-9; t += 1.0) {
        const Frame& f = frames.frames[nearest_frame(frames, t)];
        const double s = ellipse_area(covariance_at(f, dc));
        const bool inside = std::any_of(windows.begin(), windows.end(), [&](const PlantedWindow& w) {
            return f.t >= w.start && f.t < w.end();
        });
        (inside ? in : out) += s;
        ++(inside ? n_in : n_out);
    }
    if (n_in == 0 || n_out == 0) return std::numeric_limits<double>::quiet_NaN();
    return (in / n_in) / (out / n_out);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "record,t,duration_or_kind,team,probability\n";
    for (const auto& w : truth.windows) {
        out << "window," << detail::fixed(w.start) << ',' << detail::fixed(w.duration) << ",-,\n";
    }
    for (const auto& g : truth.goals) {
        out << "goal," << detail::fixed(g.t) << ",," << team_name(g.team) << ",\n";
    }
    for (const auto& tr : truth.triggers) {
        out << "trigger," << detail::fixed(tr.t) << ',' << tr.kind << ',' << team_name(tr.team) << ','
            << detail::exact(tr.probability) << '\n';
    }
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    write_ground_truth(out, truth);
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    GroundTruth gt;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        auto f = detail::split(line);
        if (f.size() != 5) continue;
        auto t = detail::to_double(f[1]);
        if (!t) throw Error("format", "bad ground truth row: " + line);
        if (f[0] == "window") {
            auto d = detail::to_double(f[2]);
            if (!d) throw Error("format", "bad ground truth row: " + line);
            gt.windows.push_back({*t, *d});
        } else if (f[0] == "goal") {
            auto team = parse_team(f[3]);
            if (!team) throw Error("format", "bad ground truth row: " + line);
            gt.goals.push_back({*t, *team});
        } else if (f[0] == "trigger") {
            auto team = parse_team(f[3]);
            auto p = detail::to_double(f[4]);
            if (!team || !p) throw Error("format", "bad ground truth row: " + line);
            gt.triggers.push_back({*t, std::string(f[2]), *team, *p});
        }
    }
    return gt;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the combined inputs
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::pair<double, double> stoppage_duration_range(EventKind k) {
    switch (k) {
        case EventKind::ThrowIn: return {2.0, 12.0};
        case EventKind::CornerKick: return {15.0, 30.0};
        case EventKind::PenaltyKick: return {20.0, 40.0};
        case EventKind::FreeKickDirect: return {10.0, 30.0};
        default: return {6.0, 20.0};
    }
}

double stoppage_duration(EventKind k, Rng& rng) {
    const auto [lo, hi] = stoppage_duration_range(k);
    return rng.uniform(lo, hi);
}

}  // namespace

SimulatorConfig plan_half(const SeasonTemplate& tmpl, std::uint64_t seed, int half_id,
                          const std::string& match_id) {
    tmpl.validate();
    SimulatorConfig cfg = tmpl.base;
    cfg.seed = seed;
    cfg.half_id = half_id;
    cfg.match_id = match_id;
    cfg.windows.clear();
    cfg.stoppages.clear();
    if (cfg.conversion.empty()) cfg.conversion = default_conversion_table();

    Rng rng(derive_seed(seed, 0x7363686564));
    double mix_total = 0.0;
    for (const auto& [k, w] : tmpl.restart_mix) mix_total += std::max(0.0, w);

    struct Item {
        bool window;
        EventKind kind;
        double duration;
        double reserved;
    };
    std::vector<Item> items;
    const double reserve = cfg.reserved_after_trigger();
    for (int i = 0; i < tmpl.windows_per_half; ++i) {
        items.push_back({true, EventKind::Other, tmpl.window_duration,
                         tmpl.window_duration + reserve});
    }
    for (int i = 0; i < tmpl.stoppages_per_half && mix_total > 0.0; ++i) {
        double u = rng.uniform(0.0, mix_total);
        EventKind kind = tmpl.restart_mix.begin()->first;
        for (const auto& [k, w] : tmpl.restart_mix) {
            if (u < w) {
                kind = k;
                break;
            }
            u -= std::max(0.0, w);
        }
        const double d = stoppage_duration(kind, rng);
        items.push_back({false, kind, d, d + reserve});
    }
    std::shuffle(items.begin(), items.end(), std::mt19937_64(derive_seed(seed, 0x73687566)));

    double used = 0.0;
    for (const auto& it : items) used += it.reserved;
    const double free = cfg.half_length - cfg.restart_settle - used - 1.0;

    // Split free time into gaps with random proportions.
    std::vector<double> gaps(items.size() + 1);
    double gsum = 0.0;
    for (auto& g : gaps) gsum += (g = -std::log(rng.uniform(1e-12, 1.0)));
    double t = cfg.restart_settle;
    for (std::size_t i = 0; i < items.size(); ++i) {
        t += free * gaps[i] / gsum;
        const double start = std::round(t * 1000.0) / 1000.0;
        if (items[i].window) {
            cfg.windows.push_back({start, items[i].duration});
        } else {
            cfg.stoppages.push_back(
                {start, items[i].kind, std::round(items[i].duration * 1000.0) / 1000.0, std::nullopt});
        }
        t = start + items[i].reserved + 1e-3;
    }
    return cfg;
}

void SeasonTemplate::validate() const {
    base.validate();
    if (windows_per_half < 0 || stoppages_per_half < 0) throw Error("precondition", "negative schedule counts");
    if (!(window_duration > 0.0)) throw Error("precondition", "window duration must be positive");
    double longest = 0.0;
    bool any = false;
    for (const auto& [k, w] : restart_mix) {
        if (w < 0.0) throw Error("precondition", "restart mix weights must be non-negative");
        if (w > 0.0) {
            any = true;
            longest = std::max(longest, stoppage_duration_range(k).second);
        }
    }
    if (stoppages_per_half > 0 && !any) throw Error("precondition", "restart mix is empty");
    const double reserve = base.reserved_after_trigger();
    const double worst = windows_per_half * (window_duration + reserve) + stoppages_per_half * (longest + reserve);
    if (worst > base.half_length - base.restart_settle - 1.0) {
        throw Error("precondition", "template schedules more than fits in one half");
    }
}

std::string half_file(int half_id, const char* what) {
    return "half" + std::to_string(half_id) + "_" + what + ".csv";
}

std::string fnv1a_hex(const std::string& bytes) { return detail::hex64(detail::fnv1a(bytes)); }

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    std::uint64_t h = detail::fnv1a({});
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h = detail::fnv1a({buf.data(), static_cast<std::size_t>(in.gcount())}, h);
    }
    return detail::hex64(h);
}

std::string match_id_for(int index) {
    char id[32];
    std::snprintf(id, sizeof id, "match_%04d", index + 1);
    return id;
}

std::uint64_t season_half_seed(const SeasonTemplate& tmpl, int match_index, int half_id) {
    return derive_seed(tmpl.base.seed, static_cast<std::uint64_t>(match_index), static_cast<std::uint64_t>(half_id));
}

SimulatedHalf simulate_season_half(const SeasonTemplate& tmpl, int match_index, int half_id) {
    return simulate_half(
        plan_half(tmpl, season_half_seed(tmpl, match_index, half_id), half_id, match_id_for(match_index)));
}

Manifest simulate_season(const SeasonTemplate& tmpl, int n_matches, const std::filesystem::path& dir) {
    if (n_matches < 1) throw Error("precondition", "need at least one match");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("io", "output directory not writable: " + dir.string());

    Manifest m;
    m.master_seed = tmpl.base.seed;
    std::string all;
    for (int i = 0; i < n_matches; ++i) {
        const std::string id = match_id_for(i);
        ManifestEntry entry;
        entry.match_id = id;
        const auto mdir = dir / id;
        std::filesystem::create_directories(mdir, ec);
        if (ec) throw Error("io", "output directory not writable: " + mdir.string());
        for (int half = 1; half <= 2; ++half) {
            (half == 1 ? entry.seed_half1 : entry.seed_half2) = season_half_seed(tmpl, i, half);
            SimulatedHalf sim = simulate_season_half(tmpl, i, half);
            const std::string ff = half_file(half, "frames"), ef = half_file(half, "events"),
                              tf = half_file(half, "truth");
            write_frames(mdir / ff, sim.frames);
            write_events(mdir / ef, sim.events);
            write_ground_truth(mdir / tf, sim.truth);
            for (const auto& f : {ff, ef, tf}) {
                entry.checksums[f] = file_digest(mdir / f);
                all += entry.match_id + "/" + f + "=" + entry.checksums[f] + "\n";
            }
        }
        m.matches.push_back(std::move(entry));
    }
    m.checksum = fnv1a_hex(all);

    nlohmann::json j;
    j["master_seed"] = m.master_seed;
    j["checksum"] = m.checksum;
    j["matches"] = nlohmann::json::array();
    for (const auto& e : m.matches) {
        j["matches"].push_back({{"id", e.match_id},
                                {"seed_half1", e.seed_half1},
                                {"seed_half2", e.seed_half2},
                                {"files", e.checksums}});
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "output directory not writable: " + dir.string());
    out << j.dump(2) << '\n';
    return m;
}

}  // namespace pitchvalue
