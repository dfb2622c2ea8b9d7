#pragma once

// Fixed-point iteration x^{k+1} = F(x^k) with per-iteration residual history.

#include "pbvp/bvp.hpp"

namespace pbvp {

struct IterationResult {
    Trajectory final;
    std::vector<ResidualReport> history;  // entry k describes iterate k; size = iterations_run + 1
    bool converged = false;
    int iterations_run = 0;
};

struct SolveOptions {
    int n_iter = 9;
    std::optional<double> tol;           // sup-norm tolerance on the iterate gap
    std::optional<Trajectory> initial;   // default: zero trajectory
    bool enforce_domain = true;          // require iterates to stay inside D
};

IterationResult solve_simple(const SystemModel& model, const BoundaryCondition& bc,
                             const ControlSchedule& schedule, const Grid& grid,
                             const SolveOptions& opts = {});

}  // namespace pbvp
