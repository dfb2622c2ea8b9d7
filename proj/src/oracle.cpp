#include "pbvp/oracle.hpp"

#include "pbvp/matops.hpp"

#include <cmath>
#include <sstream>

namespace pbvp {

Trajectory integrate_dense(const SystemModel& model, const ControlSchedule& schedule,
                           const Vector& x0, int steps) {
    const double tau = schedule.tau;
    const Grid grid(steps, tau);
    const double h = grid.dt();

    for (double ts : schedule.switch_times) {
        double frac = ts / tau * steps;
        if (std::abs(frac - std::round(frac)) > 1e-12 * steps)
            throw DomainError(
                "integrate_dense: switching times must fall on the integration mesh");
    }
    require_in_domain(model, x0, "integrate_dense: initial state");

    Trajectory traj(grid, model.n);
    traj.node(0) = x0;
    Vector x = x0;
    for (int j = 0; j < steps; ++j) {
        const double t = grid.node(j);
        const Vector u = eval_control(schedule, t);  // constant across the aligned step
        auto rhs = [&](const Vector& xx) -> Vector { return model.A * xx + model.g(xx) + u; };
        const Vector k1 = rhs(x);
        const Vector k2 = rhs(x + 0.5 * h * k1);
        const Vector k3 = rhs(x + 0.5 * h * k2);
        const Vector k4 = rhs(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || !in_domain(model, x)) {
            std::ostringstream os;
            os << "integrate_dense: state left the admissible domain at t = " << grid.node(j + 1)
               << ", state = [" << x.transpose() << "]";
            throw DomainError(os.str());
        }
        traj.node(j + 1) = x;
    }
    return traj;
}

ShootingResult shooting_solve(const SystemModel& model, const ControlSchedule& schedule,
                              double tau, const ShootingOptions& opts) {
    if (schedule.tau != tau) throw DomainError("shooting_solve: schedule period mismatch");
    const int n = model.n;

    auto flow_end = [&](const Vector& x0) -> Vector {
        return integrate_dense(model, schedule, x0, opts.integration_steps).node(
            opts.integration_steps);
    };

    Vector x0 = Vector::Zero(n);
    ShootingResult result;
    for (int it = 0; it < opts.max_steps; ++it) {
        const Vector defect = flow_end(x0) - x0;
        result.final_defect = defect.norm();
        result.newton_steps = it;
        if (result.final_defect <= opts.tol) {
            result.x0_star = x0;
            return result;
        }
        Matrix J(n, n);
        for (int c = 0; c < n; ++c) {
            const double eps = 1e-7 * (1.0 + std::abs(x0[c]));
            Vector xp = x0;
            xp[c] += eps;
            J.col(c) = ((flow_end(xp) - xp) - defect) / eps;
        }
        x0 -= solve_linear(J, Matrix(defect)).col(0);  // throws on singular Jacobian
    }
    throw NumericsError("shooting_solve: no convergence within " +
                        std::to_string(opts.max_steps) + " Newton steps");
}

}  // namespace pbvp
