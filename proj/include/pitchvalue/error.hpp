#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pitchvalue {

// All library failures surface as this exception. `code` is a short
// machine-readable tag ("io", "format", "precondition", ...) that the CLI
// echoes in its error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace pitchvalue
