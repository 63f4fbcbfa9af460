#include "doctest.h"
#include "support.hpp"

#include "pitchvalue/error.hpp"
#include "pitchvalue/geometry.hpp"
#include "pitchvalue/tracking.hpp"

#include <random>
#include <sstream>

using namespace pitchvalue;

namespace {

AttackTable leftward_a() {
    AttackTable t;
    t.set(Team::A, 1, AttackDirection::Left);
    return t;
}

std::string frame_file(const std::string& rows, double rate = 25.0) {
    std::ostringstream s;
    s << "frame_rate_hz=" << rate << ",half_id=1,match_id=m1\n"
      << "t_seconds,entity_kind,team,player_id,x_m,y_m,gk\n"
      << rows;
    return s.str();
}

// Four players per side plus the ball at time t.
std::string full_frame(double t, double first_x = 10.0) {
    std::ostringstream s;
    for (int i = 0; i < 8; ++i) {
        s << t << ",player," << (i < 4 ? "A" : "B") << ',' << i << ',' << (i == 0 ? first_x : 10.0 + i) << ",20,0\n";
    }
    s << t << ",ball,-,0,50,30,0\n";
    return s.str();
}

}  // namespace

TEST_CASE("normalize_to_attack_frame: rightward is the identity") {
    const AttackTable table;
    const Position p = normalize_to_attack_frame({10, 5}, Team::A, 1, table, PitchSpec{});
    CHECK(p == Position{10, 5});
}

TEST_CASE("normalize_to_attack_frame: leftward reflects through the center") {
    const PitchSpec pitch;
    const AttackTable table = leftward_a();
    const Position p = normalize_to_attack_frame({10, 5}, Team::A, 1, table, pitch);
    CHECK(p.x == doctest::Approx(95.0));
    CHECK(p.y == doctest::Approx(63.0));
    const Position back = normalize_to_attack_frame(p, Team::A, 1, table, pitch);
    CHECK(back.x == doctest::Approx(10.0));
    CHECK(back.y == doctest::Approx(5.0));
}

TEST_CASE("normalize_to_attack_frame: the center is fixed either way") {
    const PitchSpec pitch;
    for (const AttackTable& table : {AttackTable{}, leftward_a()}) {
        const Position c = normalize_to_attack_frame({52.5, 34}, Team::A, 1, table, pitch);
        CHECK(c == Position{52.5, 34});
    }
}

TEST_CASE("default attack table swaps ends at half time") {
    const AttackTable t;
    CHECK(t.get(Team::A, 1) == AttackDirection::Right);
    CHECK(t.get(Team::B, 1) == AttackDirection::Left);
    CHECK(t.get(Team::A, 2) == AttackDirection::Left);
    CHECK(t.get(Team::B, 2) == AttackDirection::Right);
}

TEST_CASE("normalize_to_attack_frame: bad half id is rejected") {
    CHECK_THROWS_AS(normalize_to_attack_frame({1, 1}, Team::A, 3, AttackTable{}, PitchSpec{}), Error);
}

TEST_CASE("property: clamp is idempotent and reflection is an involution") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 160.0);
    const PitchSpec pitch;
    const AttackTable table = leftward_a();
    for (int i = 0; i < 2000; ++i) {
        const Position p{u(rng), u(rng)};
        const Position c = clamp(p, pitch);
        CHECK(clamp(c, pitch) == c);
        CHECK(c.x >= 0.0);
        CHECK(c.x <= pitch.length);
        CHECK(c.y >= 0.0);
        CHECK(c.y <= pitch.width);
        const Position twice = normalize_to_attack_frame(normalize_to_attack_frame(c, Team::A, 1, table, pitch),
                                                         Team::A, 1, table, pitch);
        CHECK(twice.x == doctest::Approx(c.x).epsilon(1e-12));
        CHECK(twice.y == doctest::Approx(c.y).epsilon(1e-12));
    }
}

TEST_CASE("pitch dimensions must be positive") {
    CHECK_THROWS_AS((PitchSpec{0.0, 68.0}.validate()), Error);
    CHECK_THROWS_AS((PitchSpec{105.0, -1.0}.validate()), Error);
    CHECK_NOTHROW(PitchSpec{}.validate());
}

TEST_CASE("parse_frames: two well-formed frames") {
    std::istringstream in(frame_file(full_frame(0.0) + full_frame(0.04)));
    const auto parsed = parse_frames(in, PitchSpec{});
    CHECK(parsed.series.frames.size() == 2);
    CHECK(parsed.series.frame_rate == 25.0);
    CHECK(parsed.series.half_id == 1);
    CHECK(parsed.series.match_id == "m1");
    CHECK(parsed.series.frames[0].players.size() == 8);
    CHECK(parsed.malformed_rows == 0);
}

TEST_CASE("parse_frames: out-of-bounds coordinates are clamped") {
    std::istringstream in(frame_file(full_frame(0.0, -3.0)));
    const auto parsed = parse_frames(in, PitchSpec{});
    REQUIRE(parsed.series.frames.size() == 1);
    CHECK(parsed.series.frames[0].players[0].pos.x == 0.0);
}

TEST_CASE("parse_frames: decreasing timestamps are an error") {
    std::istringstream in(frame_file(full_frame(1.0) + full_frame(0.5)));
    CHECK_THROWS_WITH_AS(parse_frames(in, PitchSpec{}), "non-monotonic timestamps", Error);
}

TEST_CASE("parse_frames: frame rate outside the tracking range") {
    std::istringstream in(frame_file(full_frame(0.0), 60.0));
    CHECK_THROWS_AS(parse_frames(in, PitchSpec{}), Error);
}

TEST_CASE("parse_frames: malformed rows and thin frames are counted, not fatal") {
    std::string rows = full_frame(0.0) + "0.04,player,A,1,abc,2,0\n" + "0.04,ball,-,0,1,1,0\n" + full_frame(0.08);
    std::istringstream in(frame_file(rows));
    const auto parsed = parse_frames(in, PitchSpec{});
    CHECK(parsed.malformed_rows == 1);
    CHECK(parsed.rejected_frames == 1);
    CHECK(parsed.series.frames.size() == 2);
}

TEST_CASE("parse_frames: header problems") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_frames(empty, PitchSpec{}), Error);
    std::istringstream bad("rate=25\n");
    CHECK_THROWS_AS(parse_frames(bad, PitchSpec{}), Error);
}

TEST_CASE("frame files round-trip byte for byte") {
    std::istringstream in(frame_file(full_frame(0.0) + full_frame(0.04)));
    const auto parsed = parse_frames(in, PitchSpec{});
    std::ostringstream once;
    write_frames(once, parsed.series);
    std::istringstream again(once.str());
    std::ostringstream twice;
    write_frames(twice, parse_frames(again, PitchSpec{}).series);
    CHECK(once.str() == twice.str());
}

TEST_CASE("parse_events: ordering, empty logs and unknown kinds") {
    std::istringstream two("t_seconds,kind,team,x_m,y_m\n1800,goal,A,100,34\n0,kickoff,A,52.5,34\n");
    const auto ev = parse_events(two).events;
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].kind == EventKind::Kickoff);
    CHECK(ev[1].kind == EventKind::Goal);
    CHECK(ev[1].t == 1800.0);

    std::istringstream empty("");
    CHECK(parse_events(empty).events.empty());

    std::istringstream odd("t_seconds,kind,team,x_m,y_m\n5,handshake,-,1,1\n");
    const auto other = parse_events(odd).events;
    REQUIRE(other.size() == 1);
    CHECK(other[0].kind == EventKind::Other);
    CHECK(other[0].label == "handshake");
    CHECK_FALSE(other[0].team.has_value());
}

TEST_CASE("parse_events: a missing column is an error") {
    std::istringstream in("t_seconds,kind,x_m,y_m\n1,goal,1,1\n");
    CHECK_THROWS_AS(parse_events(in), Error);
}

TEST_CASE("event kind names accept either separator") {
    CHECK(parse_event_kind("free-kick-direct") == EventKind::FreeKickDirect);
    CHECK(parse_event_kind("FREE_KICK_DIRECT") == EventKind::FreeKickDirect);
    CHECK(is_restart(EventKind::CornerKick));
    CHECK_FALSE(is_restart(EventKind::Goal));
}

TEST_CASE("missing files surface as io errors") {
    try {
        parse_frames(std::filesystem::path("/nonexistent/frames.csv"), PitchSpec{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "io");
    }
}
