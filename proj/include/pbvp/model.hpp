#pragma once

// Controlled system description: linear part, nonlinearity with analytic
// Jacobian (optionally a bilinear second-derivative form), admissible box
// domain, piecewise-constant input schedules, and affine two-point boundary
// conditions.

#include "pbvp/types.hpp"

#include <functional>
#include <limits>
#include <memory>

namespace pbvp {

/// Axis-aligned open box; +-inf bounds allowed.
struct Box {
    Vector lower;  // may be -inf
    Vector upper;  // may be +inf

    static Box unbounded(int n) {
        Box b;
        b.lower = Vector::Constant(n, -std::numeric_limits<double>::infinity());
        b.upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
        return b;
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Vector& x) const {
        for (int i = 0; i < x.size(); ++i)
            if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
        return true;
    }

    /// Index of the first coordinate violating the open bounds, or -1.
    int violating_coordinate(const Vector& x) const {
        for (int i = 0; i < x.size(); ++i)
            if (!(x[i] > lower[i] && x[i] < upper[i])) return static_cast<int>(i);
        return -1;
    }
};

using VectorField = std::function<Vector(const Vector&)>;
using JacobianField = std::function<Matrix(const Vector&)>;
/// g''(x)(v1, v2) as a vector; component k is v1' * Hess(g_k)(x) * v2.
using BilinearField = std::function<Vector(const Vector&, const Vector&, const Vector&)>;

struct SystemModel {
    int n = 0;
    Matrix A;
    VectorField g;
    JacobianField g_jac;
    BilinearField g_hess;   // empty when no analytic second derivative
    Box domain;
    std::optional<double> lipschitz;     // user bound on sup |g'| over a working box
    std::optional<double> hessian_bound; // user bound H for component Hessians

    bool has_hessian() const { return static_cast<bool>(g_hess); }
};

/// Model with g == 0 on an unbounded domain.
SystemModel make_linear_model(const Matrix& A);

/// One polynomial term: coeff * prod_i x_i^{exponents[i]}.
struct PolyTerm {
    double coeff = 0.0;
    std::vector<int> exponents;
};

/// Polynomial vector field given per-component term lists; Jacobian and the
/// second-derivative bilinear form are derived from the coefficients.
SystemModel make_polynomial_model(const Matrix& A,
                                  const std::vector<std::vector<PolyTerm>>& components,
                                  const Box& domain);

/// Piecewise-constant input: u(t) = values[i] on [switch_times[i], switch_times[i+1]),
/// right-continuous, u(tau) = last value.
struct ControlSchedule {
    std::vector<double> switch_times;  // 0 = t_0 < t_1 < ... < t_N = tau
    std::vector<Vector> values;        // N vectors
    double tau = 0.0;

    int intervals() const { return static_cast<int>(values.size()); }

    /// Exact L-inf norm: max Euclidean norm over the constant values.
    double sup_norm() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, v.norm());
        return m;
    }

    /// Exact integral of u over [0, tau].
    Vector integral() const {
        Vector s = Vector::Zero(values.front().size());
        for (int i = 0; i < intervals(); ++i)
            s += values[i] * (switch_times[i + 1] - switch_times[i]);
        return s;
    }
};

ControlSchedule make_schedule(double tau,
                              const std::vector<double>& switch_fractions,
                              const std::vector<Vector>& values);

/// Constant input u(t) == value on [0, tau].
ControlSchedule make_constant_schedule(double tau, const Vector& value);

Vector eval_control(const ControlSchedule& schedule, double t);

/// Affine two-point condition M0 x(0) + M1 x(tau) = beta.
struct BoundaryCondition {
    Matrix M0;
    Matrix M1;
    Vector beta;
    bool is_periodic = false;  // set by periodic_bc; enables the specialized path

    static BoundaryCondition periodic(int n) {
        BoundaryCondition bc;
        bc.M0 = -Matrix::Identity(n, n);
        bc.M1 = Matrix::Identity(n, n);
        bc.beta = Vector::Zero(n);
        bc.is_periodic = true;
        return bc;
    }

    static BoundaryCondition two_point(const Matrix& M0, const Matrix& M1, const Vector& beta) {
        BoundaryCondition bc;
        bc.M0 = M0;
        bc.M1 = M1;
        bc.beta = beta;
        return bc;
    }
};

Vector eval_g(const SystemModel& model, const Vector& x);
Matrix eval_g_jac(const SystemModel& model, const Vector& x);
bool in_domain(const SystemModel& model, const Vector& x);

/// Throws DomainError naming the first offending coordinate.
void require_in_domain(const SystemModel& model, const Vector& x, const std::string& where);

}  // namespace pbvp
