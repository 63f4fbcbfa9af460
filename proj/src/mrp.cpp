#include "pitchvalue/mrp.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace pitchvalue {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("precondition", "gamma must lie in [0, 1]");
}

bool absorbing_zero(const MarkovChain& c, std::size_t i) {
    return c.r[i] == 0.0 && c.P[i].size() == 1 && c.P[i][0].first == i && c.P[i][0].second == 1.0;
}

// States from which no pinned state is reachable.
std::vector<std::size_t> stuck_states(const MarkovChain& c, const std::vector<bool>& pinned) {
    const std::size_t n = c.size();
    std::vector<std::vector<std::size_t>> rev(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, p] : c.P[i])
            if (p > 0.0) rev[j].push_back(i);
    std::vector<bool> reach(pinned);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i)
        if (pinned[i]) stack.push_back(i);
    while (!stack.empty()) {
        const std::size_t j = stack.back();
        stack.pop_back();
        for (auto i : rev[j]) {
            if (!reach[i]) {
                reach[i] = true;
                stack.push_back(i);
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!reach[i]) out.push_back(i);
    return out;
}

}  // namespace

double bellman_residual(const MarkovChain& chain, double gamma, const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        double pv = 0.0;
        for (const auto& [j, p] : chain.P[i]) pv += p * v[j];
        worst = std::max(worst, std::abs(v[i] - (chain.r[i] + gamma * pv)));
    }
    return worst;
}

MrpSolution solve_closed_form(const MarkovChain& chain, double gamma) {
    check_gamma(gamma);
    chain.validate(1e-9);
    const std::size_t n = chain.size();
    MrpSolution sol;
    sol.gamma = gamma;
    sol.method = MrpMethod::ClosedForm;
    sol.values.assign(n, 0.0);
    if (n == 0) return sol;

    std::vector<bool> pinned(n, false);
    for (std::size_t i = 0; i < n; ++i) pinned[i] = absorbing_zero(chain, i);
    if (gamma == 1.0) {
        auto stuck = stuck_states(chain, pinned);
        if (!stuck.empty()) {
            std::string names;
            for (std::size_t k = 0; k < stuck.size() && k < 8; ++k) {
                names += (k ? ", " : "") + chain.labels[stuck[k]];
            }
            if (stuck.size() > 8) names += ", ...";
            throw Error("singular", "I - P is singular: " + std::to_string(stuck.size()) +
                                        " state(s) never reach an absorbing zero-reward state: " + names);
        }
    }

    std::vector<std::ptrdiff_t> slot(n, -1);
    std::ptrdiff_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!pinned[i]) slot[i] = m++;
    if (m > 0) {
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd b(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) continue;
            const auto row = slot[i];
            double diag = 1.0;
            for (const auto& [j, p] : chain.P[i]) {
                if (pinned[j]) continue;  // pinned values are zero
                if (j == i) diag -= gamma * p;
                else trip.emplace_back(row, slot[j], -gamma * p);
            }
            trip.emplace_back(row, row, diag);
            b[row] = chain.r[i];
        }
        Eigen::SparseMatrix<double> A(m, m);
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw Error("singular", "I - gamma P is singular");
        Eigen::VectorXd x = lu.solve(b);
        if (lu.info() != Eigen::Success) throw Error("singular", "linear solve failed");
        for (std::size_t i = 0; i < n; ++i)
            if (!pinned[i]) sol.values[i] = x[slot[i]];
    }
    sol.residual = bellman_residual(chain, gamma, sol.values);
    for (double v : sol.values)
        if (!std::isfinite(v)) throw Error("singular", "non-finite value in closed-form solution");
    return sol;
}

MrpSolution value_iterate(const MarkovChain& chain, double gamma, double tol, int max_iters) {
    check_gamma(gamma);
    if (!(tol > 0.0)) throw Error("precondition", "tolerance must be positive");
    if (max_iters < 1) throw Error("precondition", "max iterations must be >= 1");
    chain.validate(1e-9);
    const std::size_t n = chain.size();
    MrpSolution sol;
    sol.gamma = gamma;
    sol.method = MrpMethod::Iterative;
    sol.converged = false;
    std::vector<double> v = chain.r, next(n);
    for (int it = 1; it <= max_iters; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pv = 0.0;
            for (const auto& [j, p] : chain.P[i]) pv += p * v[j];
            next[i] = chain.r[i] + gamma * pv;
            change = std::max(change, std::abs(next[i] - v[i]));
        }
        v.swap(next);
        sol.iterations = it;
        if (change < tol) {
            sol.converged = true;
            break;
        }
    }
    sol.values = std::move(v);
    sol.residual = bellman_residual(chain, gamma, sol.values);
    return sol;
}

void write_solution(std::ostream& out, const MarkovChain& chain, const MrpSolution& sol) {
    out << "state_index,state_label,value\n";
    for (std::size_t i = 0; i < sol.values.size(); ++i) {
        out << i << ',' << chain.labels[i] << ',' << detail::exact(sol.values[i]) << '\n';
    }
}

void write_solution(const std::filesystem::path& path, const MarkovChain& chain, const MrpSolution& sol) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    write_solution(out, chain, sol);
    if (!out) throw Error("io", "write failed: " + path.string());
}

}  // namespace pitchvalue
