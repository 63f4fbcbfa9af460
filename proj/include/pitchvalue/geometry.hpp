#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace pitchvalue {

struct PitchSpec {
    double length = 105.0;  // meters, along x
    double width = 68.0;    // meters, along y

    void validate() const;
    double center_x() const { return length / 2.0; }
    double center_y() const { return width / 2.0; }
};

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

enum class Team { A, B };

Team opponent(Team t);
std::string_view team_name(Team t);
std::optional<Team> parse_team(std::string_view s);

// Clamp into [0, length] x [0, width]. Idempotent.
Position clamp(Position p, const PitchSpec& pitch);

enum class AttackDirection { Right, Left };

// Which goal each team attacks in each half. The default has team A
// attacking toward x = length in the first half and the teams swapping ends
// at half time.
class AttackTable {
public:
    AttackTable();

    void set(Team team, int half_id, AttackDirection dir);
    AttackDirection get(Team team, int half_id) const;

private:
    // [team][half-1]; empty means "not in table".
    std::array<std::array<std::optional<AttackDirection>, 2>, 2> dirs_{};
};

// Express `p` in a frame where `team` attacks toward x = length. A leftward
// attacker is mapped by point reflection through the pitch center.
Position normalize_to_attack_frame(Position p, Team team, int half_id,
                                   const AttackTable& table,
                                   const PitchSpec& pitch);

}  // namespace pitchvalue
