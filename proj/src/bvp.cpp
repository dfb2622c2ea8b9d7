#include "pbvp/bvp.hpp"

#include <cmath>
#include <sstream>

namespace pbvp {

BoundaryMatrixBundle boundary_matrices(const BoundaryCondition& bc, const Matrix& A, double tau) {
    const int n = static_cast<int>(A.rows());
    const Matrix Etau = mat_exp(A, tau);
    const Matrix Eminus = mat_exp(A, -tau);
    const Matrix I = Matrix::Identity(n, n);

    BoundaryMatrixBundle bundle;
    bundle.B_tau = bc.M0 + bc.M1 * Etau;

    double rc = rcond(bundle.B_tau);
    if (rc < kRcondFloor) {
        std::ostringstream os;
        os << "dominant linearization condition violated: M0 + M1 e^{tau A} is numerically "
           << "singular (rcond = " << rc << "); for periodic conditions this means "
           << "det(e^{-tau A} - I) = 0";
        throw ConditioningError(os.str());
    }
    bundle.B_tau_inv_norm = spectral_norm(solve_linear(bundle.B_tau, I));

    const Matrix Em1 = Eminus - I;
    if (rcond(Em1) >= kRcondFloor) {
        Matrix inv = solve_linear(Em1, I);
        bundle.R_tau = spectral_norm(inv);
        bundle.M0_inv_factor = std::move(inv);
    }
    return bundle;
}

namespace {

// w_j = g(x_j) + u(t_j) for j = 0..n_G-1, optionally checked against the domain.
Matrix forcing_nodes(const SystemModel& model, const ControlSchedule& schedule,
                     const Trajectory& x, const Grid& grid, bool enforce_domain) {
    Matrix w(model.n, grid.n_g);
    for (int j = 0; j < grid.n_g; ++j) {
        if (enforce_domain) require_in_domain(model, x.node(j), "apply_F");
        w.col(j) = model.g(x.node(j)) + eval_control(schedule, grid.node(j));
    }
    if (enforce_domain) require_in_domain(model, x.node(grid.n_g), "apply_F");
    if (!w.allFinite()) throw NumericsError("apply_F: non-finite forcing values");
    return w;
}

// S_j = dt * sum_{i<j} e^{-t_i A} w_i (left rectangle), S_0 = 0.
Matrix prefix_sums(const Matrix& w, const Grid& grid, const MatExpCache& cache) {
    const int n = static_cast<int>(w.rows());
    Matrix S(n, grid.nodes());
    S.col(0).setZero();
    const double dt = grid.dt();
    Vector acc = Vector::Zero(n);
    for (int j = 1; j < grid.nodes(); ++j) {
        acc.noalias() += dt * (cache.E_minus[j - 1] * w.col(j - 1));
        S.col(j) = acc;
    }
    return S;
}

Vector boundary_constant(const SystemModel& model, const BoundaryCondition& bc,
                         const Grid& grid, const MatExpCache& cache, const Vector& S_end) {
    const int n = model.n;
    const Matrix I = Matrix::Identity(n, n);
    if (bc.is_periodic) {
        // c = (e^{-tau A} - I)^{-1} S(tau)
        return solve_linear(cache.E_minus[grid.n_g] - I, S_end);
    }
    const Matrix B_tau = bc.M0 + bc.M1 * cache.E_plus[grid.n_g];
    if (rcond(B_tau) < kRcondFloor)
        throw ConditioningError(
            "dominant linearization condition violated: boundary matrix is numerically singular");
    return solve_linear(B_tau, Vector(bc.beta - bc.M1 * (cache.E_plus[grid.n_g] * S_end)));
}

}  // namespace

Trajectory apply_F(const SystemModel& model, const BoundaryCondition& bc,
                   const ControlSchedule& schedule, const Trajectory& x, const Grid& grid,
                   const MatExpCache& cache, bool enforce_domain) {
    if (!(x.grid == grid) || !(cache.grid == grid))
        throw DomainError("apply_F: grid mismatch");
    const Matrix w = forcing_nodes(model, schedule, x, grid, enforce_domain);
    const Matrix S = prefix_sums(w, grid, cache);
    const Vector c = boundary_constant(model, bc, grid, cache, S.col(grid.n_g));

    Trajectory out(grid, model.n);
    out.iteration = x.iteration + 1;
    for (int j = 0; j < grid.nodes(); ++j) {
        out.node(j).noalias() = cache.E_plus[j] * (c + S.col(j));
        if (!enforce_domain) continue;
        int bad = model.domain.violating_coordinate(out.node(j));
        if (bad >= 0) {
            std::ostringstream os;
            os << "apply_F: output leaves the admissible domain at node " << j
               << " (t = " << grid.node(j) << "), coordinate " << (bad + 1)
               << "; the working-domain invariance assumption fails for this input";
            throw DomainError(os.str());
        }
    }
    if (!out.all_finite()) throw NumericsError("apply_F: non-finite output");
    return out;
}

Trajectory apply_P(const SystemModel& model, const BoundaryCondition& bc,
                   const ControlSchedule& schedule, const Trajectory& x, const Grid& grid,
                   const MatExpCache& cache, bool enforce_domain) {
    Trajectory out = apply_F(model, bc, schedule, x, grid, cache, enforce_domain);
    out.samples -= x.samples;
    out.iteration = x.iteration;
    return out;
}

ResidualReport residual_d(const Trajectory& traj, const SystemModel& model,
                          const ControlSchedule& schedule, const Grid& grid,
                          const MatExpCache& cache, const BoundaryCondition* bc) {
    if (!(traj.grid == grid) || !(cache.grid == grid))
        throw DomainError("residual_d: grid mismatch");
    BoundaryCondition periodic = BoundaryCondition::periodic(model.n);
    const BoundaryCondition& use_bc = bc ? *bc : periodic;

    const Matrix w = forcing_nodes(model, schedule, traj, grid, /*enforce_domain=*/true);
    // c needs S(tau); one rectangle pass.
    const double dt = grid.dt();
    Vector S_end = Vector::Zero(model.n);
    for (int j = 0; j < grid.n_g; ++j)
        S_end.noalias() += dt * (cache.E_minus[j] * w.col(j));
    const Vector c = boundary_constant(model, use_bc, grid, cache, S_end);

    // x~_j = e^{dt A} (x~_{j-1} + dt w_{j-1}), x~_0 = c; algebraically equal to
    // e^{t_j A}(c + S_j) and to the exponential-weighted sum of the forcing.
    const Matrix& Estep = cache.E_plus[1];
    Vector xt = c;
    double d = 0.0;
    for (int j = 1; j < grid.nodes(); ++j) {
        xt = Estep * (xt + dt * w.col(j - 1));
        d = std::max(d, (traj.node(j) - xt).norm());
    }
    ResidualReport rep;
    rep.d = d;
    rep.periodicity_gap = (traj.node(0) - traj.node(grid.n_g)).norm();
    if (!std::isfinite(rep.d) || !std::isfinite(rep.periodicity_gap))
        throw NumericsError("residual_d: non-finite residual");
    return rep;
}

}  // namespace pbvp
