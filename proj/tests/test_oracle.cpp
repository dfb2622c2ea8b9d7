#include <doctest.h>

#include "pbvp/oracle.hpp"
#include "pbvp/reactor.hpp"

#include <cmath>
#include <random>

using namespace pbvp;

TEST_CASE("dense integration preserves a stationary solution") {
    Matrix A(1, 1);
    A << -1.0;
    const SystemModel m = make_linear_model(A);
    const ControlSchedule u = make_constant_schedule(1.0, Vector::Ones(1));
    const Trajectory t = integrate_dense(m, u, Vector::Ones(1), 1000);
    for (int j = 0; j <= 1000; ++j)
        CHECK(std::abs(t.samples(0, j) - 1.0) <= 1e-12);
}

TEST_CASE("dense integration reproduces the scalar exponential") {
    Matrix A(1, 1);
    A << -1.0;
    const SystemModel m = make_linear_model(A);
    const ControlSchedule u = make_constant_schedule(1.0, Vector::Zero(1));
    const Trajectory t = integrate_dense(m, u, Vector::Ones(1), 1000);
    CHECK(std::abs(t.samples(0, 1000) - std::exp(-1.0)) <= 1e-10);
}

TEST_CASE("step-halving on the reactor shows fourth-order convergence") {
    const SystemModel m = build_reactor_model();
    const ControlSchedule sched = build_schedule_N5(1.0);
    const Vector x0 = Vector::Zero(2);
    const Vector e1 = integrate_dense(m, sched, x0, 500).node(500);
    const Vector e2 = integrate_dense(m, sched, x0, 1000).node(1000);
    const Vector e3 = integrate_dense(m, sched, x0, 2000).node(2000);
    const double ratio = (e1 - e2).norm() / (e2 - e3).norm();
    CHECK(ratio >= 16.0 * 0.8);
    CHECK(ratio <= 16.0 * 1.2);
}

TEST_CASE("global error order on the linear scalar test is at least 3.8") {
    Matrix A(1, 1);
    A << -1.0;
    const SystemModel m = make_linear_model(A);
    const ControlSchedule u = make_constant_schedule(1.0, Vector::Zero(1));
    const double exact = std::exp(-1.0);
    const double err1 = std::abs(integrate_dense(m, u, Vector::Ones(1), 50).samples(0, 50) - exact);
    const double err2 =
        std::abs(integrate_dense(m, u, Vector::Ones(1), 100).samples(0, 100) - exact);
    CHECK(std::log2(err1 / err2) >= 3.8);
}

TEST_CASE("switching times must land on the integration mesh") {
    const SystemModel m = build_reactor_model();
    Vector v = Vector::Zero(2);
    const ControlSchedule bad = make_schedule(1.0, {0.0, 1.0 / 3.0, 1.0}, {v, v});
    CHECK_THROWS_AS(integrate_dense(m, bad, Vector::Zero(2), 100), DomainError);
    // aligned case runs
    CHECK_NOTHROW(integrate_dense(m, bad, Vector::Zero(2), 300));
}

TEST_CASE("domain exit is reported with time and state") {
    Matrix A(1, 1);
    A << 1.0;
    std::vector<std::vector<PolyTerm>> comps(1);
    comps[0].push_back({1.0, {2}});  // x' = x + x^2: finite-time blowup from x0 = 2
    Box D;
    D.lower = Vector::Constant(1, -10.0);
    D.upper = Vector::Constant(1, 10.0);
    const SystemModel m = make_polynomial_model(A, comps, D);
    const ControlSchedule u = make_constant_schedule(2.0, Vector::Zero(1));
    try {
        integrate_dense(m, u, 2.0 * Vector::Ones(1), 2000);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("t = ") != std::string::npos);
    }
}

TEST_CASE("shooting on the linear scalar system recovers the closed form") {
    Matrix A(1, 1);
    A << -1.0;
    const SystemModel m = make_linear_model(A);
    const ControlSchedule u = make_constant_schedule(1.0, Vector::Ones(1));
    const ShootingResult r = shooting_solve(m, u, 1.0);
    CHECK(std::abs(r.x0_star[0] - 1.0) <= 1e-10);
    CHECK(r.final_defect <= 1e-10);
}

TEST_CASE("shooting matches the variation-of-constants formula on a 3d linear system") {
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix R(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R(i, j) = 0.4 * dist(rng);
    const Matrix A = R - 2.0 * Matrix::Identity(3, 3);  // comfortably stable
    const SystemModel m = make_linear_model(A);

    std::vector<Vector> vals;
    for (int i = 0; i < 4; ++i) {
        Vector v(3);
        v << dist(rng), dist(rng), dist(rng);
        vals.push_back(v);
    }
    const ControlSchedule sched = make_schedule(1.0, {0.0, 0.25, 0.5, 0.75, 1.0}, vals);

    ShootingOptions so;
    so.integration_steps = 40000;
    const ShootingResult r = shooting_solve(m, sched, 1.0, so);

    // x0 = (e^{-tau A} - I)^{-1} sum_i A^{-1}(e^{-t_{i-1}A} - e^{-t_i A}) u_i  (exact)
    Vector rhs = Vector::Zero(3);
    const Matrix Ainv = solve_linear(A, Matrix::Identity(3, 3));
    for (int i = 0; i < 4; ++i) {
        const Matrix piece =
            mat_exp(A, -sched.switch_times[i]) - mat_exp(A, -sched.switch_times[i + 1]);
        rhs += Ainv * (piece * vals[i]);
    }
    const Vector x0_exact =
        solve_linear(mat_exp(A, -1.0) - Matrix::Identity(3, 3), Matrix(rhs)).col(0);
    CHECK((r.x0_star - x0_exact).norm() <= 1e-8);
}

TEST_CASE("oracle self-consistency: the flow returns to the shooting point") {
    const SystemModel m = build_reactor_model();
    const ControlSchedule sched = build_schedule_N5(1.0);
    ShootingOptions so;
    so.tol = 1e-10;
    const ShootingResult r = shooting_solve(m, sched, 1.0, so);
    const Trajectory t = integrate_dense(m, sched, r.x0_star, so.integration_steps);
    CHECK((t.node(so.integration_steps) - r.x0_star).norm() <= 10.0 * so.tol);
}
