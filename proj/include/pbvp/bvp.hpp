#pragma once

// Discrete realizations of the integral operator F, the map P = F - x, the
// boundary matrix bundle, and the residual metrics of the discrete solution.
//
// All integrals use the left-endpoint rectangle rule on the trajectory grid;
// the discretization is pinned so benchmark residuals are reproducible.

#include "pbvp/matops.hpp"
#include "pbvp/model.hpp"
#include "pbvp/types.hpp"

namespace pbvp {

struct BoundaryMatrixBundle {
    Matrix B_tau;                          // M0 + M1 e^{tau A}
    std::optional<double> B_tau_inv_norm;  // |B_tau^{-1}|
    std::optional<double> R_tau;           // |(e^{-tau A} - I)^{-1}|
    std::optional<Matrix> M0_inv_factor;   // (e^{-tau A} - I)^{-1}, periodic path
};

/// Assembles B_tau and the inverse norms. Throws ConditioningError with a
/// dominant-linearization diagnostic when B_tau is numerically singular.
BoundaryMatrixBundle boundary_matrices(const BoundaryCondition& bc, const Matrix& A, double tau);

struct ResidualReport {
    double d = 0.0;               // sup-norm residual of the integral operator equation
    double periodicity_gap = 0.0; // |x_0 - x_{n_G}|
    std::optional<double> iterate_gap;  // sup_j |x_j^{(k)} - x_j^{(k-1)}|, when meaningful
};

/// F(x) on the grid: out_j = e^{t_j A} (c + S_j) with the rectangle-rule
/// prefix sums S_j and the boundary-consistent constant c.
///
/// With enforce_domain the input and output are required to stay inside the
/// model's admissible box (working-domain invariance); without it only
/// finiteness is enforced, which admits transient iterates that leave the box
/// on the way to a solution inside it.
Trajectory apply_F(const SystemModel& model, const BoundaryCondition& bc,
                   const ControlSchedule& schedule, const Trajectory& x, const Grid& grid,
                   const MatExpCache& cache, bool enforce_domain = true);

/// P(x) = F(x) - x, node-wise.
Trajectory apply_P(const SystemModel& model, const BoundaryCondition& bc,
                   const ControlSchedule& schedule, const Trajectory& x, const Grid& grid,
                   const MatExpCache& cache, bool enforce_domain = true);

/// Residual of the discrete integral equation: d = sup_j |x~_j - x_j| where
/// x~ is rebuilt by the O(n_G) recursion x~_j = e^{dt A}(x~_{j-1} + dt w_{j-1})
/// seeded at the boundary-consistent constant c, plus the periodicity gap.
ResidualReport residual_d(const Trajectory& traj, const SystemModel& model,
                          const ControlSchedule& schedule, const Grid& grid,
                          const MatExpCache& cache,
                          const BoundaryCondition* bc = nullptr);

}  // namespace pbvp
