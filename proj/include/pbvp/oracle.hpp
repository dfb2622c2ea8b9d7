#pragma once

// Independent verification path: dense fixed-step RK4 integration of the
// state equation and a shooting method for the periodic initial condition.
// Shares no discretization with the integral-operator solvers, so agreement
// between the two is evidence rather than tautology.

#include "pbvp/model.hpp"
#include "pbvp/types.hpp"

namespace pbvp {

/// Classical RK4 with `steps` uniform steps over [0, tau]. Every switching
/// time of the schedule must fall on a mesh node (within 1e-12 tau), so the
/// integrand is smooth inside every step; throws DomainError otherwise, or
/// when the state leaves the admissible domain (reporting time and state).
Trajectory integrate_dense(const SystemModel& model, const ControlSchedule& schedule,
                           const Vector& x0, int steps);

struct ShootingResult {
    Vector x0_star;
    int newton_steps = 0;
    double final_defect = 0.0;  // |x(tau; x0) - x0|
};

struct ShootingOptions {
    double tol = 1e-10;
    int max_steps = 50;
    int integration_steps = 20000;
};

/// Newton iteration on x0 -> x(tau; x0) - x0 with a forward-difference
/// Jacobian of the dense flow; starts from x0 = 0.
ShootingResult shooting_solve(const SystemModel& model, const ControlSchedule& schedule,
                              double tau, const ShootingOptions& opts = {});

}  // namespace pbvp
