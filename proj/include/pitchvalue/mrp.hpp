#pragma once

#include "pitchvalue/chain.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pitchvalue {

enum class MrpMethod { ClosedForm, Iterative };

struct MrpSolution {
    std::vector<double> values;
    double gamma = 1.0;
    MrpMethod method = MrpMethod::ClosedForm;
    int iterations = 0;
    double residual = 0.0;  // max |v - (r + gamma P v)|
    bool converged = true;
};

// Solves (I - gamma P) v = r by sparse LU. With gamma = 1, absorbing
// zero-reward states are pinned to 0 and every other state must reach one;
// otherwise the error names the states that never leave their class.
MrpSolution solve_closed_form(const MarkovChain& chain, double gamma);

// v <- r + gamma P v from v = r until the max change drops below tol.
// Returns the partial result with converged = false when max_iters runs out.
MrpSolution value_iterate(const MarkovChain& chain, double gamma, double tol, int max_iters);

double bellman_residual(const MarkovChain& chain, double gamma, const std::vector<double>& v);

void write_solution(std::ostream& out, const MarkovChain& chain, const MrpSolution& sol);
void write_solution(const std::filesystem::path& path, const MarkovChain& chain, const MrpSolution& sol);

}  // namespace pitchvalue
