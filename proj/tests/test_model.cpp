#include <doctest.h>

#include "pbvp/model.hpp"
#include "pbvp/reactor.hpp"

#include <random>

using namespace pbvp;

TEST_CASE("eval_control returns the interval values of the N5 schedule") {
    const ControlSchedule s = build_schedule_N5(1.0);

    Vector u = eval_control(s, 0.05);
    CHECK(u[0] == doctest::Approx(1.798));
    CHECK(u[1] == doctest::Approx(-0.06663));

    // right-continuity at a switch, and the closing convention u(tau) = last value
    Vector u2 = eval_control(s, 0.1);
    CHECK(u2[1] == doctest::Approx(0.06663));
    Vector u5 = eval_control(s, 1.0);
    CHECK(u5[0] == doctest::Approx(-1.798));
    CHECK(u5[1] == doctest::Approx(-0.06663));

    CHECK_THROWS_AS(eval_control(s, -0.01), DomainError);
    CHECK_THROWS_AS(eval_control(s, 1.01), DomainError);
}

TEST_CASE("single-interval schedule is constant") {
    Vector v(2);
    v << 3.0, -4.0;
    const ControlSchedule s = make_constant_schedule(2.0, v);
    CHECK((eval_control(s, 0.0) - v).norm() == 0.0);
    CHECK((eval_control(s, 1.234) - v).norm() == 0.0);
    CHECK((eval_control(s, 2.0) - v).norm() == 0.0);
    CHECK(s.sup_norm() == doctest::Approx(5.0));
}

TEST_CASE("schedule integral is the exact weighted sum of values") {
    const ControlSchedule s = build_schedule_N5(1.0);
    Vector expect = Vector::Zero(2);
    for (int i = 0; i < s.intervals(); ++i)
        expect += s.values[i] * (s.switch_times[i + 1] - s.switch_times[i]);
    CHECK((s.integral() - expect).norm() == 0.0);
    // mean-zero bang-bang input
    CHECK(s.integral().norm() < 1e-15);
}

TEST_CASE("sup_norm is exact over the schedule values") {
    const ControlSchedule s = build_schedule_N5(1.0);
    CHECK(s.sup_norm() == doctest::Approx(1.7992341584407517).epsilon(1e-14));
}

TEST_CASE("linear model has zero nonlinearity") {
    Matrix A(2, 2);
    A << 0, 1, -1, 0;
    const SystemModel m = make_linear_model(A);
    Vector x(2);
    x << 5.0, -7.0;
    CHECK(eval_g(m, x).norm() == 0.0);
    CHECK(eval_g_jac(m, x).norm() == 0.0);
    CHECK(in_domain(m, x));
}

TEST_CASE("polynomial model evaluates terms and the derived Jacobian") {
    Matrix A = Matrix::Zero(2, 2);
    // g(x) = (x1^2, 0)
    std::vector<std::vector<PolyTerm>> comps(2);
    comps[0].push_back({1.0, {2, 0}});
    const SystemModel m = make_polynomial_model(A, comps, Box::unbounded(2));
    Vector x(2);
    x << 2.0, 3.0;
    Vector g = eval_g(m, x);
    CHECK(g[0] == doctest::Approx(4.0));
    CHECK(g[1] == 0.0);
    Matrix J = eval_g_jac(m, x);
    CHECK(J(0, 0) == doctest::Approx(4.0));
    CHECK(J(0, 1) == 0.0);
    CHECK(J(1, 0) == 0.0);
    CHECK(J(1, 1) == 0.0);
    // second-derivative form: g1'' = [[2,0],[0,0]]
    Vector v1(2), v2(2);
    v1 << 1.0, 5.0;
    v2 << -2.0, 1.0;
    Vector h = m.g_hess(x, v1, v2);
    CHECK(h[0] == doctest::Approx(2.0 * 1.0 * -2.0));
    CHECK(h[1] == 0.0);
}

TEST_CASE("reactor nonlinearity vanishes at the origin and has the analytic Jacobian") {
    const SystemModel m = build_reactor_model();
    CHECK(m.A(0, 0) == doctest::Approx(-1.0));
    CHECK(m.A(1, 1) == doctest::Approx(-1.0));

    const Vector zero = Vector::Zero(2);
    CHECK(eval_g(m, zero).norm() <= 1e-12);

    // frozen high-precision values of -k_i e^{-kappa} and -k_i kappa e^{-kappa}
    const Matrix J0 = eval_g_jac(m, zero);
    CHECK(J0(0, 0) == doctest::Approx(-1.1154122601644265).epsilon(1e-13));
    CHECK(J0(0, 1) == doctest::Approx(-19.820875863121859).epsilon(1e-13));
    CHECK(J0(1, 0) == doctest::Approx(0.017232438939471034).epsilon(1e-13));
    CHECK(J0(1, 1) == doctest::Approx(0.30622043995440027).epsilon(1e-13));

    Vector x(2);
    x << 0.1, 0.02;
    const Vector g = eval_g(m, x);
    CHECK(g[0] == doctest::Approx(-0.62298857257477002).epsilon(1e-13));
    CHECK(g[1] == doctest::Approx(0.0096247933793558729).epsilon(1e-13));
}

TEST_CASE("in_domain excludes the reactor boundary") {
    const SystemModel m = build_reactor_model();
    Vector x(2);
    x << 0.0, 0.0;
    CHECK(in_domain(m, x));
    x << -1.0, 0.0;
    CHECK(!in_domain(m, x));
    x << 0.0, -1.0000001;
    CHECK(!in_domain(m, x));
    CHECK_THROWS_AS(eval_g(m, x), DomainError);
}

TEST_CASE("unbounded domain accepts any finite point") {
    const SystemModel m = make_linear_model(Matrix::Identity(3, 3));
    Vector x(3);
    x << 1e12, -1e12, 0.0;
    CHECK(in_domain(m, x));
}

TEST_CASE("analytic Jacobian matches central differences at random points") {
    const SystemModel m = build_reactor_model();
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        Vector x(2);
        x << dist(rng), dist(rng);
        const Matrix J = eval_g_jac(m, x);
        const double step = 1e-6 * (1.0 + x.norm());
        Matrix Jfd(2, 2);
        for (int c = 0; c < 2; ++c) {
            Vector xp = x, xm = x;
            xp[c] += step;
            xm[c] -= step;
            Jfd.col(c) = (m.g(xp) - m.g(xm)) / (2.0 * step);
        }
        CHECK((J - Jfd).norm() <= 1e-6 * (1.0 + J.norm()));
    }
}

TEST_CASE("schedule validation rejects malformed inputs") {
    Vector v = Vector::Zero(1);
    CHECK_THROWS_AS(make_schedule(0.0, {0.0, 1.0}, {v}), DomainError);
    CHECK_THROWS_AS(make_schedule(1.0, {0.0, 0.5}, {v}), DomainError);
    CHECK_THROWS_AS(make_schedule(1.0, {0.0, 0.6, 0.5, 1.0}, {v, v, v}), DomainError);
    CHECK_THROWS_AS(make_schedule(1.0, {0.0, 1.0}, {v, v}), DomainError);
}
