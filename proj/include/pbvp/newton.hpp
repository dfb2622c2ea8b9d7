#pragma once

// Newton schemes for the operator equation P(x) = F(x) - x = 0 under
// periodic boundary conditions, built on the explicit inverse of the frozen
// Frechet derivative P'(x).
//
// The inverse acts through the variational fundamental matrix Phi:
//   dz' = (A + g'(x(t))) dz - g'(x(t)) dy,   dz = dx + dy,
//   dx(t) = Phi(t) C - Phi(t) * integral_0^t Phi^{-1} g' dy ds - dy(t).
// The integration constant is fixed by the periodicity of dz, which holds
// for every dy because F' maps into periodic functions:
//   (Phi(tau) - I) C = Phi(tau) S'(tau).
// This form is algebraically identical to eliminating C through the mass
// matrix M_x but keeps the updated iterate periodic to rounding.

#include "pbvp/bvp.hpp"
#include "pbvp/simple_iteration.hpp"

namespace pbvp {

struct PPrimeInverse {
    Trajectory base_point;            // x at which P' is frozen
    FundamentalMatrix Phi;
    Matrix M_x;                       // rectangle-rule mass matrix, kept for diagnostics
    Eigen::PartialPivLU<Matrix> monodromy_solve;  // factors Phi(tau) - I
    std::vector<Matrix> gprime_nodes; // g'(x(t_j))
};

/// Freezes P' at x. Uses exact exponentials for Phi when x is constant in t,
/// the RK4 variational integration otherwise. Throws ConditioningError when
/// the mass matrix (equivalently Phi(tau) - I) is numerically singular; in
/// that case check the contraction bound S < 1 of the certificate module.
PPrimeInverse assemble_pprime_inverse(const SystemModel& model, const Trajectory& x,
                                      const Grid& grid, const MatExpCache& cache);

/// dx = [P'(base)]^{-1} dy for an arbitrary direction dy on the same grid.
Trajectory apply_pprime_inverse(const PPrimeInverse& pinv, const Trajectory& dy);

/// Modified Newton: x^{k+1} = x^k - [P'(x^{(0)})]^{-1} P(x^k), P' assembled once.
IterationResult solve_newton_modified(const SystemModel& model, const ControlSchedule& schedule,
                                      const Grid& grid, const SolveOptions& opts = {});

/// Classical Newton: P' reassembled at every iterate (experimental; the
/// variational matrix is re-integrated along each iterate).
IterationResult solve_newton_classical(const SystemModel& model, const ControlSchedule& schedule,
                                       const Grid& grid, const SolveOptions& opts = {});

/// P''(x)(v1, v2) on the grid by the rectangle rule; test utility.
/// Requires an analytic second derivative on the model.
Trajectory eval_second_derivative(const SystemModel& model, const Trajectory& x,
                                  const Trajectory& v1, const Trajectory& v2, const Grid& grid,
                                  const MatExpCache& cache);

}  // namespace pbvp
