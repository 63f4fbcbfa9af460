#include "pitchvalue/events.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace pitchvalue {

namespace {

constexpr std::array<EventType, kEventTypeCount> kAllTypes{
    EventType::InPlay,           EventType::Kickoff,          EventType::ThrowIn,
    EventType::FreeKickDirect,   EventType::FreeKickIndirect, EventType::CornerKick,
    EventType::PenaltyKick,      EventType::OppKickoff,       EventType::OppThrowIn,
    EventType::OppFreeKickDirect, EventType::OppFreeKickIndirect, EventType::OppCornerKick,
    EventType::OppPenaltyKick,
};

constexpr std::array<std::string_view, kEventTypeCount> kCodes{
    "IN", "KO", "TI", "FK", "IFK", "CK", "PK", "KO_OPP", "TI_OPP", "FK_OPP", "IFK_OPP", "CK_OPP", "PK_OPP",
};

constexpr std::array<std::string_view, kEventTypeCount> kDescriptions{
    "in-play intense period start",
    "kickoff",
    "throw-in",
    "direct free kick",
    "indirect free kick",
    "corner kick",
    "penalty kick",
    "opponent kickoff",
    "opponent throw-in",
    "opponent direct free kick",
    "opponent indirect free kick",
    "opponent corner kick",
    "opponent penalty kick",
};

// Frames farther than this from a period start do not locate its ball.
constexpr double kBallLookupTolerance = 0.5;

bool kills_ball(EventKind k) {
    return k == EventKind::Foul || k == EventKind::OutOfBounds || k == EventKind::Goal;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::replace(out.begin(), out.end(), '-', '_');
    return out;
}

}  // namespace

const std::array<EventType, kEventTypeCount>& all_event_types() { return kAllTypes; }

std::string_view event_type_code(EventType e) { return kCodes[static_cast<std::size_t>(e)]; }

std::string_view event_type_description(EventType e) {
    return kDescriptions[static_cast<std::size_t>(e)];
}

std::optional<EventType> parse_event_type(std::string_view s) {
    const std::string u = upper(detail::trim(s));
    for (std::size_t i = 0; i < kCodes.size(); ++i)
        if (kCodes[i] == u) return kAllTypes[i];
    if (u == "IN_PLAY" || u == "INPLAY") return EventType::InPlay;
    const EventKind kind = parse_event_kind(s);
    return restart_event_type(kind, true);
}

std::optional<EventType> restart_event_type(EventKind kind, bool own) {
    EventType e;
    switch (kind) {
        case EventKind::Kickoff: e = EventType::Kickoff; break;
        case EventKind::ThrowIn: e = EventType::ThrowIn; break;
        case EventKind::FreeKickDirect: e = EventType::FreeKickDirect; break;
        case EventKind::FreeKickIndirect: e = EventType::FreeKickIndirect; break;
        case EventKind::CornerKick: e = EventType::CornerKick; break;
        case EventKind::PenaltyKick: e = EventType::PenaltyKick; break;
        default: return std::nullopt;
    }
    if (!own) e = static_cast<EventType>(static_cast<int>(e) + 6);
    return e;
}

void ExtractionConfig::validate() const {
    if (!(reset_threshold > 0.0)) throw Error("precondition", "reset threshold must be positive");
    detector.validate();
}

Position Perspective::normalize(Position p) const {
    return normalize_to_attack_frame(clamp(p, pitch), analyzed, half_id, attack, pitch);
}

std::vector<SignificantEvent> extract_inplay_events(const std::vector<IntensePeriod>& periods,
                                                    const FrameSeries& frames,
                                                    const Perspective& view) {
    std::vector<SignificantEvent> out;
    out.reserve(periods.size());
    for (const auto& p : periods) {
        if (frames.frames.empty()) throw Error("precondition", "no frame near period start");
        const Frame& f = frames.frames[nearest_frame(frames, p.start)];
        if (std::abs(f.t - p.start) > kBallLookupTolerance) {
            throw Error("precondition", "no frame near period start " + detail::fixed(p.start));
        }
        SignificantEvent e;
        e.kind = SignificantKind::InPlay;
        e.type = EventType::InPlay;
        e.t = p.start;
        e.location = view.normalize(f.ball);
        out.push_back(e);
    }
    return out;
}

std::vector<SignificantEvent> extract_stoppage_events(const std::vector<RawEvent>& events,
                                                      const ExtractionConfig& cfg,
                                                      const Perspective& view) {
    cfg.validate();
    std::vector<SignificantEvent> out;
    // The half opens with a dead ball.
    std::optional<double> dead_since = -std::numeric_limits<double>::infinity();
    bool after_goal = false;
    for (const auto& ev : events) {
        if (kills_ball(ev.kind)) {
            if (!dead_since) dead_since = ev.t;
            if (ev.kind == EventKind::Goal) after_goal = true;
            continue;
        }
        if (!is_restart(ev.kind)) continue;
        const bool kickoff_after_goal =
            ev.kind == EventKind::Kickoff && (after_goal || std::isinf(dead_since.value_or(0.0)));
        const bool qualifies =
            kickoff_after_goal || (dead_since && ev.t - *dead_since >= cfg.reset_threshold);
        if (qualifies && ev.team) {
            SignificantEvent e;
            e.kind = SignificantKind::Stoppage;
            e.type = *restart_event_type(ev.kind, *ev.team == view.analyzed);
            e.t = ev.t;
            e.location = view.normalize(ev.location);
            e.team = ev.team;
            out.push_back(e);
        }
        dead_since.reset();
        after_goal = false;
    }
    return out;
}

std::vector<DeadBall> dead_ball_intervals(const std::vector<RawEvent>& events) {
    std::vector<DeadBall> out;
    std::optional<double> since;
    for (const auto& ev : events) {
        if (kills_ball(ev.kind)) {
            if (!since) since = ev.t;
        } else if (is_restart(ev.kind) && since) {
            out.push_back({*since, ev.t});
            since.reset();
        } else if (ev.kind == EventKind::HalfEnd && since) {
            out.push_back({*since, ev.t});
            since.reset();
        }
    }
    if (since) out.push_back({*since, std::numeric_limits<double>::infinity()});
    return out;
}

std::vector<Goal> goals_from_events(const std::vector<RawEvent>& events) {
    std::vector<Goal> goals;
    for (const auto& ev : events)
        if (ev.kind == EventKind::Goal && ev.team) goals.push_back({ev.t, *ev.team});
    return goals;
}

std::vector<SignificantEvent> drop_dead_ball_events(std::vector<SignificantEvent> inplay,
                                                    const std::vector<DeadBall>& dead) {
    std::erase_if(inplay, [&](const SignificantEvent& e) {
        return std::any_of(dead.begin(), dead.end(),
                           [&](const DeadBall& d) { return e.t >= d.start && e.t < d.end; });
    });
    return inplay;
}

MergeResult merge_and_attach_rewards(const std::vector<SignificantEvent>& inplay,
                                     const std::vector<SignificantEvent>& stoppage,
                                     const std::vector<Goal>& goals, Team analyzed) {
    for (std::size_t i = 1; i < goals.size(); ++i) {
        if (goals[i].t < goals[i - 1].t) throw Error("precondition", "goals must be time-ordered");
    }
    MergeResult res;
    auto& ev = res.events;
    ev.reserve(inplay.size() + stoppage.size());
    ev.insert(ev.end(), stoppage.begin(), stoppage.end());
    ev.insert(ev.end(), inplay.begin(), inplay.end());
    // Stoppage events come first on equal times, so the in-play duplicate is
    // the one removed below.
    std::stable_sort(ev.begin(), ev.end(),
                     [](const SignificantEvent& a, const SignificantEvent& b) { return a.t < b.t; });
    std::vector<SignificantEvent> unique;
    unique.reserve(ev.size());
    for (const auto& e : ev) {
        if (!unique.empty() && e.t == unique.back().t) {
            if (e.kind == SignificantKind::InPlay) continue;
            res.diagnostics.push_back("two stoppage events at t=" + detail::fixed(e.t) + "; kept the first");
            continue;
        }
        unique.push_back(e);
    }
    ev = std::move(unique);

    for (auto& e : ev) {
        e.reward = 0;
        e.own_score = e.opp_score = 0;
        for (const auto& g : goals) {
            if (g.t >= e.t) break;
            (g.team == analyzed ? e.own_score : e.opp_score)++;
        }
    }
    std::vector<int> credited(ev.size(), 0);
    for (const auto& g : goals) {
        auto it = std::lower_bound(ev.begin(), ev.end(), g.t,
                                   [](const SignificantEvent& e, double t) { return e.t < t; });
        if (it == ev.begin()) {
            res.diagnostics.push_back("goal at t=" + detail::fixed(g.t) +
                                      " has no preceding event; reward dropped");
            continue;
        }
        const auto k = static_cast<std::size_t>(it - ev.begin()) - 1;
        ev[k].reward += g.team == analyzed ? 1 : -1;
        if (++credited[k] > 1) {
            res.diagnostics.push_back("event at t=" + detail::fixed(ev[k].t) + " precedes " +
                                      std::to_string(credited[k]) + " goals; rewards summed");
        }
    }
    return res;
}

MergeResult extract_half(const FrameSeries& frames, const std::vector<RawEvent>& events,
                         const ExtractionConfig& cfg, const Perspective& view) {
    cfg.validate();
    auto periods = detect_intense_periods(frames, cfg.detector);
    auto inplay = drop_dead_ball_events(extract_inplay_events(periods, frames, view),
                                        dead_ball_intervals(events));
    auto stoppage = extract_stoppage_events(events, cfg, view);
    return merge_and_attach_rewards(inplay, stoppage, goals_from_events(events), view.analyzed);
}

void write_significant_events(std::ostream& out, const std::vector<SignificantEvent>& events) {
    out << "kind,event_type,t,x,y,team,own_score,opp_score,reward\n";
    for (const auto& e : events) {
        out << (e.kind == SignificantKind::InPlay ? "in_play" : "stoppage") << ','
            << event_type_code(e.type) << ',' << detail::fixed(e.t) << ',' << detail::fixed(e.location.x)
            << ',' << detail::fixed(e.location.y) << ',' << (e.team ? team_name(*e.team) : "-") << ','
            << e.own_score << ',' << e.opp_score << ',' << e.reward << '\n';
    }
}

void write_significant_events(const std::filesystem::path& path,
                              const std::vector<SignificantEvent>& events) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    write_significant_events(out, events);
    if (!out) throw Error("io", "write failed: " + path.string());
}

std::vector<SignificantEvent> read_significant_events(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).substr(0, 4) != "kind") {
        throw Error("format", "missing significant-event header");
    }
    std::vector<SignificantEvent> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split(line);
        auto bad = [&] { return Error("format", "bad significant-event row " + std::to_string(row)); };
        if (f.size() != 9) throw bad();
        SignificantEvent e;
        if (f[0] == "in_play") e.kind = SignificantKind::InPlay;
        else if (f[0] == "stoppage") e.kind = SignificantKind::Stoppage;
        else throw bad();
        auto type = parse_event_type(f[1]);
        auto t = detail::to_double(f[2]);
        auto x = detail::to_double(f[3]);
        auto y = detail::to_double(f[4]);
        auto own = detail::to_int(f[6]);
        auto opp = detail::to_int(f[7]);
        auto reward = detail::to_int(f[8]);
        if (!type || !t || !x || !y || !own || !opp || !reward) throw bad();
        e.type = *type;
        e.t = *t;
        e.location = {*x, *y};
        e.team = parse_team(f[5]);
        e.own_score = static_cast<int>(*own);
        e.opp_score = static_cast<int>(*opp);
        e.reward = static_cast<int>(*reward);
        out.push_back(e);
    }
    return out;
}

std::vector<SignificantEvent> read_significant_events(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    return read_significant_events(in);
}

}  // namespace pitchvalue
