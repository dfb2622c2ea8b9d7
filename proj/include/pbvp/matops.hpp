#pragma once

// Dense small-matrix kernels: matrix exponential, spectral norm, guarded
// linear solves, per-node exponential caches, and the fundamental matrix of
// the variational equation.

#include "pbvp/model.hpp"
#include "pbvp/types.hpp"

#include <vector>

namespace pbvp {

/// rcond threshold below which solves are refused.
inline constexpr double kRcondFloor = 1e-12;

/// e^{tA} by scaling-and-squaring with a diagonal Pade approximant.
Matrix mat_exp(const Matrix& A, double t);

/// Largest singular value.
double spectral_norm(const Matrix& A);

/// sigma_min / sigma_max; 0 for an exactly singular matrix.
double rcond(const Matrix& A);

/// X with A X = B; throws ConditioningError when rcond(A) < kRcondFloor.
Matrix solve_linear(const Matrix& A, const Matrix& B);

/// e^{+t_j A} and e^{-t_j A} for every grid node.
struct MatExpCache {
    Grid grid;
    std::vector<Matrix> E_plus;
    std::vector<Matrix> E_minus;
};

MatExpCache build_matexp_cache(const Matrix& A, const Grid& grid);

/// Phi(t_j) and Phi(t_j)^{-1} for the variational system
/// Phi' = (A + g'(x(t))) Phi along a trajectory x.
struct FundamentalMatrix {
    Grid grid;
    std::vector<Matrix> Phi;
    std::vector<Matrix> Phi_inv;
};

/// Classical 4th-order fixed-step integration on the trajectory grid, one
/// step per interval, with g'(x(t)) interpolated linearly between nodes.
/// Phi_inv comes from the adjoint system (Phi^{-1})' = -Phi^{-1}(A + g').
FundamentalMatrix fundamental_matrix(const SystemModel& model, const Trajectory& x,
                                     const Grid& grid);

/// Special case x == const: Phi(t_j) = e^{t_j (A + g'(x0))} exactly.
FundamentalMatrix fundamental_matrix_autonomous(const SystemModel& model, const Vector& x0,
                                                const Grid& grid);

}  // namespace pbvp
