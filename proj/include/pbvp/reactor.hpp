#pragma once

// Non-isothermal reactor case study: model family, the five-interval
// bang-bang schedule, and the residual-table / periodic-trajectory
// benchmark drivers with embedded reference values.

#include "pbvp/model.hpp"
#include "pbvp/simple_iteration.hpp"

#include <string>

namespace pbvp {

struct ReactorParams {
    double gamma = 1.0;
    double kappa = 17.77;
    double phi1 = 1.0;
    double phi2 = 1.0;
    double k1 = 5.819e7;
    double k2 = -8.99e5;
    double u1_max = 1.798;
    double u1_min = -1.798;
    double u2_max = 0.06663;
    double u2_min = -0.06663;
};

/// A = diag(-phi1, -phi2); g_i(x) = k_i (e^{-kappa} - (x1+1)^gamma e^{-kappa/(x2+1)});
/// D = {x1 > -1, x2 > -1}. Analytic Jacobian and second-derivative form included.
/// g(0) = 0, so the origin is an equilibrium for u == 0.
SystemModel build_reactor_model(const ReactorParams& params = {});

/// Five-interval bang-bang schedule with switch fractions (0, .1, .3, .5, .8, 1)
/// and values u1 = u3 = -u4 = (u1_max, u2_min), u2 = -u5 = (u1_max, u2_max).
ControlSchedule build_schedule_N5(double tau, const ReactorParams& params = {});

struct BenchCell {
    int k = 0;
    double d = 0.0;
    double gap = 0.0;
    std::optional<double> reference;   // embedded reference residual, when available
    std::optional<double> rel_tol;     // tolerance applied to this cell, when checked
    std::optional<bool> pass;          // verdict, when checked
};

struct Table1Report {
    int n_g = 0;
    int n_iter = 0;
    std::vector<BenchCell> algorithm1;  // fixed-point iteration
    std::vector<BenchCell> algorithm2;  // modified Newton
    bool gaps_ok_alg1 = false;          // all gaps <= 1e-9
    bool gaps_ok_alg2 = false;          // all gaps <= 1e-12
    bool floor_ok_alg2 = false;         // d <= 1e-12 for k >= 7
    double seconds_alg1 = 0.0;
    double seconds_alg2 = 0.0;
    bool checks_enabled = true;
    bool all_pass() const;
};

/// Runs both schemes at tau = 1 and compares the residual histories against
/// the embedded reference table. With checks_enabled = false (small grids)
/// the verdicts are suppressed and the run is informational.
Table1Report run_table1(int n_g = 100000, int n_iter = 9, bool checks_enabled = true);

struct Figure1Report {
    Trajectory trajectory;
    double final_d = 0.0;
    double periodicity_gap = 0.0;
    bool in_domain = false;
    int iterations = 0;
    double seconds = 0.0;
};

/// Modified-Newton periodic trajectory over tau = 10; asserts the
/// periodicity gap <= 1e-9 and domain membership.
Figure1Report run_figure1(double tau = 10.0, int n_g = 100000, int n_iter = 20);

/// CSV with header t,x1,..,xn and one row per node, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace pbvp
