#include "pitchvalue/geometry.hpp"

#include "pitchvalue/error.hpp"

#include <algorithm>
#include <cmath>

namespace pitchvalue {

void PitchSpec::validate() const {
    if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) ||
        !std::isfinite(width)) {
        throw Error("precondition", "pitch dimensions must be positive");
    }
}

Team opponent(Team t) { return t == Team::A ? Team::B : Team::A; }

std::string_view team_name(Team t) { return t == Team::A ? "A" : "B"; }

std::optional<Team> parse_team(std::string_view s) {
    if (s == "A") return Team::A;
    if (s == "B") return Team::B;
    return std::nullopt;
}

Position clamp(Position p, const PitchSpec& pitch) {
    return {std::clamp(p.x, 0.0, pitch.length), std::clamp(p.y, 0.0, pitch.width)};
}

AttackTable::AttackTable() {
    set(Team::A, 1, AttackDirection::Right);
    set(Team::B, 1, AttackDirection::Left);
    set(Team::A, 2, AttackDirection::Left);
    set(Team::B, 2, AttackDirection::Right);
}

void AttackTable::set(Team team, int half_id, AttackDirection dir) {
    if (half_id != 1 && half_id != 2) {
        throw Error("precondition", "half id must be 1 or 2");
    }
    dirs_[static_cast<int>(team)][half_id - 1] = dir;
}

AttackDirection AttackTable::get(Team team, int half_id) const {
    if (half_id != 1 && half_id != 2) {
        throw Error("precondition", "half id must be 1 or 2");
    }
    const auto& d = dirs_[static_cast<int>(team)][half_id - 1];
    if (!d) {
        throw Error("precondition", "team " + std::string(team_name(team)) +
                                        " not in attack-direction table");
    }
    return *d;
}

Position normalize_to_attack_frame(Position p, Team team, int half_id,
                                   const AttackTable& table,
                                   const PitchSpec& pitch) {
    if (table.get(team, half_id) == AttackDirection::Right) return p;
    return {pitch.length - p.x, pitch.width - p.y};
}

}  // namespace pitchvalue
