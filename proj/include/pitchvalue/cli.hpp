#pragma once

#include "pitchvalue/board.hpp"
#include "pitchvalue/events.hpp"
#include "pitchvalue/fvi.hpp"
#include "pitchvalue/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pitchvalue {

// Everything the subcommands read. Fields are filled from defaults, then a
// TOML config file (--config), then command-line flags.
struct PipelineConfig {
    std::filesystem::path data_dir = "data";
    std::filesystem::path model_path = "model.pvm";
    std::filesystem::path out_dir = ".";

    PitchSpec pitch;
    double half_length = 2700.0;

    SeasonTemplate season;
    int matches = 10;

    ExtractionConfig extraction;  // holds the detector settings
    FviConfig fvi;
    bool score_difference = false;
    BoardQuery board;

    std::string bind = "127.0.0.1";
    int port = 8080;

    // Checks module settings and that `out_dir` exists or can be created.
    void validate() const;
};

// Runs one subcommand; args exclude the program name. Failures print
// {"error": {"code", "message"}} on `err` and return nonzero.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitchvalue
