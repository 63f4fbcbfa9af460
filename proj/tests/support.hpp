#pragma once

#include "pitchvalue/chain.hpp"
#include "pitchvalue/tracking.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

using namespace pitchvalue;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("pitchvalue_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Frame with the given outfield positions split between both teams (first
// half to A) and the ball at the first position.
inline Frame frame_at(double t, const std::vector<Position>& players) {
    Frame f;
    f.t = t;
    for (std::size_t i = 0; i < players.size(); ++i) {
        f.players.push_back({i < players.size() / 2 ? Team::A : Team::B, static_cast<int>(i), players[i], false});
    }
    f.ball = players.empty() ? Position{} : players.front();
    return f;
}

// Episode with the given rewards; states differ in time only.
inline Episode episode_with(const std::vector<int>& rewards, std::string id = "ep") {
    Episode ep;
    ep.id = std::move(id);
    for (std::size_t k = 0; k < rewards.size(); ++k) {
        StateFeature x;
        x.t = 10.0 * static_cast<double>(k + 1);
        x.l = {50.0, 30.0};
        ep.states.push_back(x);
        ep.rewards.push_back(rewards[k]);
    }
    return ep;
}

}  // namespace testing

