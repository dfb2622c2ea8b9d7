#include "pbvp/newton.hpp"

#include <cmath>
#include <sstream>

namespace pbvp {

namespace {

bool is_constant_trajectory(const Trajectory& x) {
    for (int j = 1; j < x.samples.cols(); ++j)
        if (x.samples.col(j) != x.samples.col(0)) return false;
    return true;
}

}  // namespace

PPrimeInverse assemble_pprime_inverse(const SystemModel& model, const Trajectory& x,
                                      const Grid& grid, const MatExpCache& cache) {
    if (!(x.grid == grid) || !(cache.grid == grid))
        throw DomainError("assemble_pprime_inverse: grid mismatch");
    const int n = model.n;
    const Matrix I = Matrix::Identity(n, n);

    PPrimeInverse pinv;
    pinv.base_point = x;
    pinv.gprime_nodes.reserve(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j)
        pinv.gprime_nodes.push_back(eval_g_jac(model, x.node(j)));

    pinv.Phi = is_constant_trajectory(x)
                   ? fundamental_matrix_autonomous(model, x.node(0), grid)
                   : fundamental_matrix(model, x, grid);

    // M_x = (e^{-tau A} - I)^{-1} * dt * sum_j e^{-t_{j-1} A} g'(x_{j-1}) Phi_{j-1} - I
    const double dt = grid.dt();
    Matrix acc = Matrix::Zero(n, n);
    for (int j = 1; j < grid.nodes(); ++j)
        acc.noalias() += cache.E_minus[j - 1] * (pinv.gprime_nodes[j - 1] * pinv.Phi.Phi[j - 1]);
    const Matrix Em1 = cache.E_minus[grid.n_g] - I;
    if (rcond(Em1) < kRcondFloor)
        throw ConditioningError(
            "dominant linearization condition violated: e^{-tau A} - I is numerically singular");
    pinv.M_x = solve_linear(Em1, Matrix(dt * acc)) - I;

    double rc = rcond(pinv.M_x);
    if (rc < kRcondFloor) {
        std::ostringstream os;
        os << "variational mass matrix M_x is numerically singular (rcond = " << rc
           << "); the Neumann contraction bound S < 1 likely fails for this system";
        throw ConditioningError(os.str());
    }
    const Matrix monodromy_shift = pinv.Phi.Phi[grid.n_g] - I;
    if (rcond(monodromy_shift) < kRcondFloor)
        throw ConditioningError(
            "variational monodromy has a unit multiplier: Phi(tau) - I is numerically singular");
    pinv.monodromy_solve = monodromy_shift.partialPivLu();
    return pinv;
}

Trajectory apply_pprime_inverse(const PPrimeInverse& pinv, const Trajectory& dy) {
    const Grid& grid = pinv.base_point.grid;
    if (!(dy.grid == grid)) throw DomainError("apply_pprime_inverse: grid mismatch");
    const int n = dy.dim();
    const double dt = grid.dt();

    // S'_j = dt * sum_{i<j} Phi^{-1}(t_i) g'(x(t_i)) dy_i
    Matrix Sp(n, grid.nodes());
    Sp.col(0).setZero();
    Vector acc = Vector::Zero(n);
    for (int j = 1; j < grid.nodes(); ++j) {
        acc.noalias() +=
            dt * (pinv.Phi.Phi_inv[j - 1] * (pinv.gprime_nodes[j - 1] * dy.node(j - 1)));
        Sp.col(j) = acc;
    }
    // (Phi(tau) - I) C = Phi(tau) S'(tau): keeps dz = dx + dy periodic.
    const Vector C = pinv.monodromy_solve.solve(
        Vector(pinv.Phi.Phi[grid.n_g] * Sp.col(grid.n_g)));

    Trajectory dx(grid, n);
    dx.iteration = dy.iteration;
    for (int j = 0; j < grid.nodes(); ++j)
        dx.node(j).noalias() = pinv.Phi.Phi[j] * (C - Sp.col(j)) - dy.node(j);
    if (!dx.all_finite()) throw NumericsError("apply_pprime_inverse: non-finite result");
    return dx;
}

namespace {

IterationResult newton_loop(const SystemModel& model, const ControlSchedule& schedule,
                            const Grid& grid, const SolveOptions& opts, bool reassemble) {
    if (schedule.tau != grid.tau)
        throw DomainError("newton: schedule and grid periods differ");
    const BoundaryCondition bc = BoundaryCondition::periodic(model.n);
    const MatExpCache cache = build_matexp_cache(model.A, grid);

    Trajectory x = opts.initial ? *opts.initial : zero_trajectory(grid, model.n);
    if (!(x.grid == grid)) throw DomainError("newton: initial trajectory grid mismatch");
    if (opts.enforce_domain)
        for (int j = 0; j < grid.nodes(); ++j)
            require_in_domain(model, x.node(j), "newton: initial trajectory");
    x.iteration = 0;

    std::optional<PPrimeInverse> pinv;
    if (!reassemble) pinv.emplace(assemble_pprime_inverse(model, x, grid, cache));

    IterationResult result;
    std::optional<double> prev_step;
    for (int k = 0; ; ++k) {
        Trajectory dy;
        try {
            dy = apply_P(model, bc, schedule, x, grid, cache, opts.enforce_domain);
        } catch (const DomainError& e) {
            std::ostringstream os;
            os << "newton: iteration " << k << ": " << e.what();
            throw DomainError(os.str());
        }
        ResidualReport rep;
        rep.d = 0.0;
        for (int j = 0; j < grid.nodes(); ++j)
            rep.d = std::max(rep.d, dy.node(j).norm());
        rep.periodicity_gap = (x.node(0) - x.node(grid.n_g)).norm();
        rep.iterate_gap = prev_step;
        result.history.push_back(rep);

        if (k == opts.n_iter) break;
        if (reassemble) pinv.emplace(assemble_pprime_inverse(model, x, grid, cache));
        Trajectory dx = apply_pprime_inverse(*pinv, dy);
        double step = 0.0;
        for (int j = 0; j < grid.nodes(); ++j) step = std::max(step, dx.node(j).norm());
        x.samples -= dx.samples;
        x.iteration = k + 1;
        if (opts.enforce_domain)
            for (int j = 0; j < grid.nodes(); ++j)
                require_in_domain(model, x.node(j), "newton: updated iterate");
        prev_step = step;
        result.iterations_run = k + 1;
        if (opts.tol && step <= *opts.tol) {
            result.converged = true;
            Trajectory dyv = apply_P(model, bc, schedule, x, grid, cache, opts.enforce_domain);
            ResidualReport last;
            last.d = 0.0;
            for (int j = 0; j < grid.nodes(); ++j)
                last.d = std::max(last.d, dyv.node(j).norm());
            last.periodicity_gap = (x.node(0) - x.node(grid.n_g)).norm();
            last.iterate_gap = prev_step;
            result.history.push_back(last);
            break;
        }
    }
    result.final = std::move(x);
    return result;
}

}  // namespace

IterationResult solve_newton_modified(const SystemModel& model, const ControlSchedule& schedule,
                                      const Grid& grid, const SolveOptions& opts) {
    return newton_loop(model, schedule, grid, opts, false);
}

IterationResult solve_newton_classical(const SystemModel& model, const ControlSchedule& schedule,
                                       const Grid& grid, const SolveOptions& opts) {
    return newton_loop(model, schedule, grid, opts, true);
}

Trajectory eval_second_derivative(const SystemModel& model, const Trajectory& x,
                                  const Trajectory& v1, const Trajectory& v2, const Grid& grid,
                                  const MatExpCache& cache) {
    if (!model.has_hessian())
        throw DomainError("eval_second_derivative: model has no analytic second derivative");
    if (!(x.grid == grid) || !(v1.grid == grid) || !(v2.grid == grid))
        throw DomainError("eval_second_derivative: grid mismatch");
    const int n = model.n;
    const double dt = grid.dt();

    // Same prefix structure as F, with forcing h_j = g''(x_j)(v1_j, v2_j).
    Matrix h(n, grid.n_g);
    for (int j = 0; j < grid.n_g; ++j)
        h.col(j) = model.g_hess(x.node(j), v1.node(j), v2.node(j));

    Matrix S(n, grid.nodes());
    S.col(0).setZero();
    Vector acc = Vector::Zero(n);
    for (int j = 1; j < grid.nodes(); ++j) {
        acc.noalias() += dt * (cache.E_minus[j - 1] * h.col(j - 1));
        S.col(j) = acc;
    }
    const Matrix I = Matrix::Identity(n, n);
    const Vector c = solve_linear(cache.E_minus[grid.n_g] - I, Vector(S.col(grid.n_g)));

    Trajectory out(grid, n);
    for (int j = 0; j < grid.nodes(); ++j)
        out.node(j).noalias() = cache.E_plus[j] * (c + S.col(j));
    return out;
}

}  // namespace pbvp
