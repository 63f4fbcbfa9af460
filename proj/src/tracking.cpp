#include "pitchvalue/tracking.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace pitchvalue {

namespace {

struct KindName {
    EventKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 13> kKindNames{{
    {EventKind::Kickoff, "kickoff"},
    {EventKind::Pass, "pass"},
    {EventKind::Foul, "foul"},
    {EventKind::ThrowIn, "throw_in"},
    {EventKind::FreeKickDirect, "free_kick_direct"},
    {EventKind::FreeKickIndirect, "free_kick_indirect"},
    {EventKind::CornerKick, "corner_kick"},
    {EventKind::PenaltyKick, "penalty_kick"},
    {EventKind::Goal, "goal"},
    {EventKind::OutOfBounds, "out_of_bounds"},
    {EventKind::StoppageEnd, "stoppage_end"},
    {EventKind::HalfEnd, "half_end"},
    {EventKind::Other, "other"},
}};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    return out;
}

bool frame_is_complete(const Frame& f, bool has_ball) {
    if (!has_ball) return false;
    int a = 0, b = 0;
    for (const auto& p : f.players) (p.team == Team::A ? a : b)++;
    return a >= kMinPlayersPerTeam && b >= kMinPlayersPerTeam;
}

}  // namespace

std::string_view event_kind_name(EventKind k) {
    for (const auto& kn : kKindNames)
        if (kn.kind == k) return kn.name;
    return "other";
}

EventKind parse_event_kind(std::string_view s) {
    std::string norm(s);
    std::replace(norm.begin(), norm.end(), '-', '_');
    std::transform(norm.begin(), norm.end(), norm.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& kn : kKindNames)
        if (kn.name == norm) return kn.kind;
    return EventKind::Other;
}

bool is_restart(EventKind k) {
    switch (k) {
        case EventKind::Kickoff:
        case EventKind::ThrowIn:
        case EventKind::FreeKickDirect:
        case EventKind::FreeKickIndirect:
        case EventKind::CornerKick:
        case EventKind::PenaltyKick:
            return true;
        default:
            return false;
    }
}

ParsedFrames parse_frames(std::istream& in, const PitchSpec& pitch) {
    pitch.validate();
    ParsedFrames result;
    FrameSeries& series = result.series;

    std::string line;
    if (!std::getline(in, line)) throw Error("format", "empty frame file");

    // Header: frame_rate_hz=..,half_id=..,match_id=..
    std::map<std::string, std::string, std::less<>> header;
    for (auto field : detail::split(line)) {
        auto eq = field.find('=');
        if (eq == std::string_view::npos) throw Error("format", "unparseable frame header");
        header.emplace(std::string(detail::trim(field.substr(0, eq))),
                       std::string(detail::trim(field.substr(eq + 1))));
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) throw Error("format", std::string("frame header missing ") + key);
        return it->second;
    };
    auto rate = detail::to_double(need("frame_rate_hz"));
    auto half = detail::to_int(need("half_id"));
    if (!rate || !half) throw Error("format", "unparseable frame header");
    if (*rate < kMinFrameRate || *rate > kMaxFrameRate) {
        throw Error("format", "frame rate outside [15, 30] Hz");
    }
    if (*half != 1 && *half != 2) throw Error("format", "half_id must be 1 or 2");
    series.frame_rate = *rate;
    series.half_id = static_cast<int>(*half);
    series.match_id = need("match_id");

    if (!std::getline(in, line) || detail::trim(line).substr(0, 9) != "t_seconds") {
        throw Error("format", "missing frame column header");
    }

    Frame current;
    bool open = false;
    bool has_ball = false;
    auto close_frame = [&] {
        if (!open) return;
        if (frame_is_complete(current, has_ball)) {
            series.frames.push_back(std::move(current));
        } else {
            ++result.rejected_frames;
        }
        current = Frame{};
        open = false;
        has_ball = false;
    };

    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto f = detail::split(line);
        if (f.size() != 7) {
            ++result.malformed_rows;
            continue;
        }
        auto t = detail::to_double(f[0]);
        auto pid = detail::to_int(f[3]);
        auto x = detail::to_double(f[4]);
        auto y = detail::to_double(f[5]);
        auto gk = detail::to_int(f[6]);
        bool is_ball = f[1] == "ball";
        bool is_player = f[1] == "player";
        auto team = parse_team(f[2]);
        if (!t || !pid || !x || !y || !gk || (!is_ball && !is_player) ||
            (is_player && !team) || !std::isfinite(*t) || !std::isfinite(*x) ||
            !std::isfinite(*y)) {
            ++result.malformed_rows;
            continue;
        }
        if (open && *t < current.t) throw Error("format", "non-monotonic timestamps");
        if (!open && !series.frames.empty() && *t <= series.frames.back().t) {
            throw Error("format", "non-monotonic timestamps");
        }
        if (open && *t != current.t) close_frame();
        if (!open) {
            current.t = *t;
            open = true;
        }
        Position p = clamp({*x, *y}, pitch);
        if (is_ball) {
            current.ball = p;
            has_ball = true;
        } else {
            current.players.push_back({*team, static_cast<int>(*pid), p, *gk != 0});
        }
    }
    close_frame();
    return result;
}

ParsedFrames parse_frames(const std::filesystem::path& path, const PitchSpec& pitch) {
    auto in = open_input(path);
    return parse_frames(in, pitch);
}

ParsedEvents parse_events(std::istream& in) {
    ParsedEvents result;
    std::string line;
    while (std::getline(in, line) && detail::trim(line).empty()) {
    }
    if (detail::trim(line).empty()) return result;  // empty log

    auto cols = detail::split(line);
    std::array<std::string_view, 5> required{"t_seconds", "kind", "team", "x_m", "y_m"};
    std::array<std::size_t, 5> idx{};
    for (std::size_t r = 0; r < required.size(); ++r) {
        auto it = std::find(cols.begin(), cols.end(), required[r]);
        if (it == cols.end()) {
            throw Error("format", "event log missing column " + std::string(required[r]));
        }
        idx[r] = static_cast<std::size_t>(it - cols.begin());
    }
    const std::size_t ncols = cols.size();

    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto f = detail::split(line);
        if (f.size() != ncols) {
            ++result.malformed_rows;
            continue;
        }
        auto t = detail::to_double(f[idx[0]]);
        auto x = detail::to_double(f[idx[3]]);
        auto y = detail::to_double(f[idx[4]]);
        if (!t || !x || !y) {
            ++result.malformed_rows;
            continue;
        }
        RawEvent ev;
        ev.t = *t;
        ev.label = std::string(f[idx[1]]);
        ev.kind = parse_event_kind(ev.label);
        ev.team = parse_team(f[idx[2]]);
        ev.location = {*x, *y};
        result.events.push_back(std::move(ev));
    }
    std::stable_sort(result.events.begin(), result.events.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.t < b.t; });
    return result;
}

ParsedEvents parse_events(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_events(in);
}

void write_frames(std::ostream& out, const FrameSeries& series) {
    out << "frame_rate_hz=" << detail::fixed(series.frame_rate, 3) << ",half_id=" << series.half_id
        << ",match_id=" << series.match_id << '\n';
    out << "t_seconds,entity_kind,team,player_id,x_m,y_m,gk\n";
    std::string row;
    for (const auto& fr : series.frames) {
        const std::string t = detail::fixed(fr.t);
        for (const auto& p : fr.players) {
            row.clear();
            row += t;
            row += ",player,";
            row += team_name(p.team);
            row += ',';
            row += std::to_string(p.player_id);
            row += ',';
            row += detail::fixed(p.pos.x);
            row += ',';
            row += detail::fixed(p.pos.y);
            row += p.is_goalkeeper ? ",1\n" : ",0\n";
            out << row;
        }
        out << t << ",ball,-,0," << detail::fixed(fr.ball.x) << ',' << detail::fixed(fr.ball.y)
            << ",0\n";
    }
}

void write_frames(const std::filesystem::path& path, const FrameSeries& series) {
    auto out = open_output(path);
    write_frames(out, series);
    if (!out) throw Error("io", "write failed: " + path.string());
}

void write_events(std::ostream& out, const std::vector<RawEvent>& events) {
    out << "t_seconds,kind,team,x_m,y_m\n";
    for (const auto& e : events) {
        std::string_view kind = e.kind == EventKind::Other && !e.label.empty()
                                    ? std::string_view(e.label)
                                    : event_kind_name(e.kind);
        out << detail::fixed(e.t) << ',' << kind << ',' << (e.team ? team_name(*e.team) : "-")
            << ',' << detail::fixed(e.location.x) << ',' << detail::fixed(e.location.y) << '\n';
    }
}

void write_events(const std::filesystem::path& path, const std::vector<RawEvent>& events) {
    auto out = open_output(path);
    write_events(out, events);
    if (!out) throw Error("io", "write failed: " + path.string());
}

std::size_t nearest_frame(const FrameSeries& series, double t) {
    const auto& fr = series.frames;
    if (fr.empty()) throw Error("precondition", "empty frame series");
    auto it = std::lower_bound(fr.begin(), fr.end(), t,
                               [](const Frame& f, double v) { return f.t < v; });
    if (it == fr.begin()) return 0;
    if (it == fr.end()) return fr.size() - 1;
    auto prev = it - 1;
    return static_cast<std::size_t>((t - prev->t <= it->t - t ? prev : it) - fr.begin());
}

}  // namespace pitchvalue
