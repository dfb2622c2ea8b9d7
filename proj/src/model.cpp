#include "pbvp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pbvp {

SystemModel make_linear_model(const Matrix& A) {
    if (A.rows() != A.cols() || !A.allFinite())
        throw DomainError("make_linear_model: A must be square and finite");
    SystemModel m;
    m.n = static_cast<int>(A.rows());
    m.A = A;
    const int n = m.n;
    m.g = [n](const Vector&) { return Vector::Zero(n); };
    m.g_jac = [n](const Vector&) { return Matrix::Zero(n, n); };
    m.g_hess = [n](const Vector&, const Vector&, const Vector&) { return Vector::Zero(n); };
    m.domain = Box::unbounded(n);
    m.lipschitz = 0.0;
    m.hessian_bound = 0.0;
    return m;
}

namespace {

double poly_eval(const std::vector<PolyTerm>& terms, const Vector& x) {
    double s = 0.0;
    for (const auto& t : terms) {
        double p = t.coeff;
        for (size_t i = 0; i < t.exponents.size(); ++i)
            p *= std::pow(x[static_cast<int>(i)], t.exponents[i]);
        s += p;
    }
    return s;
}

// Partial derivative of a term list with respect to coordinate d.
std::vector<PolyTerm> poly_diff(const std::vector<PolyTerm>& terms, int d) {
    std::vector<PolyTerm> out;
    for (const auto& t : terms) {
        if (t.exponents[d] == 0) continue;
        PolyTerm dt = t;
        dt.coeff *= t.exponents[d];
        dt.exponents[d] -= 1;
        out.push_back(dt);
    }
    return out;
}

}  // namespace

SystemModel make_polynomial_model(const Matrix& A,
                                  const std::vector<std::vector<PolyTerm>>& components,
                                  const Box& domain) {
    if (A.rows() != A.cols() || !A.allFinite())
        throw DomainError("make_polynomial_model: A must be square and finite");
    const int n = static_cast<int>(A.rows());
    if (static_cast<int>(components.size()) != n)
        throw DomainError("make_polynomial_model: one term list per component required");
    for (const auto& comp : components)
        for (const auto& t : comp)
            if (static_cast<int>(t.exponents.size()) != n)
                throw DomainError("make_polynomial_model: exponent list length must equal n");

    // Differentiate the coefficient lists once up front.
    auto jac_terms = std::make_shared<std::vector<std::vector<std::vector<PolyTerm>>>>();
    auto hess_terms = std::make_shared<std::vector<std::vector<std::vector<std::vector<PolyTerm>>>>>();
    jac_terms->resize(n);
    hess_terms->resize(n);
    for (int k = 0; k < n; ++k) {
        (*jac_terms)[k].resize(n);
        (*hess_terms)[k].resize(n);
        for (int i = 0; i < n; ++i) {
            (*jac_terms)[k][i] = poly_diff(components[k], i);
            (*hess_terms)[k][i].resize(n);
            for (int j = 0; j < n; ++j)
                (*hess_terms)[k][i][j] = poly_diff((*jac_terms)[k][i], j);
        }
    }

    SystemModel m;
    m.n = n;
    m.A = A;
    m.domain = domain;
    auto comps = std::make_shared<std::vector<std::vector<PolyTerm>>>(components);
    m.g = [comps, n](const Vector& x) {
        Vector v(n);
        for (int k = 0; k < n; ++k) v[k] = poly_eval((*comps)[k], x);
        return v;
    };
    m.g_jac = [jac_terms, n](const Vector& x) {
        Matrix J(n, n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) J(k, i) = poly_eval((*jac_terms)[k][i], x);
        return J;
    };
    m.g_hess = [hess_terms, n](const Vector& x, const Vector& v1, const Vector& v2) {
        Vector out(n);
        for (int k = 0; k < n; ++k) {
            // evaluate each H_ij once (i <= j) and pair symmetrically so the
            // form is bit-stable under v1 <-> v2
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                s += poly_eval((*hess_terms)[k][i][i], x) * (v1[i] * v2[i]);
                for (int j = i + 1; j < n; ++j) {
                    const double cross = v1[i] * v2[j] + v1[j] * v2[i];
                    s += poly_eval((*hess_terms)[k][i][j], x) * cross;
                }
            }
            out[k] = s;
        }
        return out;
    };
    return m;
}

ControlSchedule make_schedule(double tau,
                              const std::vector<double>& switch_fractions,
                              const std::vector<Vector>& values) {
    if (!(tau > 0.0)) throw DomainError("make_schedule: tau must be positive");
    if (switch_fractions.size() < 2 || switch_fractions.front() != 0.0 ||
        switch_fractions.back() != 1.0)
        throw DomainError("make_schedule: fractions must run from 0 to 1");
    if (values.size() + 1 != switch_fractions.size())
        throw DomainError("make_schedule: need one value per interval");
    for (size_t i = 1; i < switch_fractions.size(); ++i)
        if (!(switch_fractions[i] > switch_fractions[i - 1]))
            throw DomainError("make_schedule: fractions must be strictly increasing");

    ControlSchedule s;
    s.tau = tau;
    s.switch_times.resize(switch_fractions.size());
    for (size_t i = 0; i < switch_fractions.size(); ++i)
        s.switch_times[i] = switch_fractions[i] * tau;
    s.switch_times.back() = tau;  // exact by construction
    s.values = values;
    return s;
}

ControlSchedule make_constant_schedule(double tau, const Vector& value) {
    return make_schedule(tau, {0.0, 1.0}, {value});
}

Vector eval_control(const ControlSchedule& schedule, double t) {
    if (!(t >= 0.0 && t <= schedule.tau)) {
        std::ostringstream os;
        os << "eval_control: t = " << t << " outside [0, " << schedule.tau << "]";
        throw DomainError(os.str());
    }
    if (t >= schedule.switch_times.back()) return schedule.values.back();
    // first switch time strictly greater than t; u is right-continuous
    auto it = std::upper_bound(schedule.switch_times.begin(), schedule.switch_times.end(), t);
    int idx = static_cast<int>(it - schedule.switch_times.begin()) - 1;
    return schedule.values[static_cast<size_t>(idx)];
}

Vector eval_g(const SystemModel& model, const Vector& x) {
    require_in_domain(model, x, "eval_g");
    return model.g(x);
}

Matrix eval_g_jac(const SystemModel& model, const Vector& x) {
    require_in_domain(model, x, "eval_g_jac");
    return model.g_jac(x);
}

bool in_domain(const SystemModel& model, const Vector& x) {
    return model.domain.contains(x);
}

void require_in_domain(const SystemModel& model, const Vector& x, const std::string& where) {
    int bad = model.domain.violating_coordinate(x);
    if (bad >= 0) {
        std::ostringstream os;
        os << where << ": state leaves the admissible domain at coordinate " << (bad + 1)
           << " (value " << x[bad] << ", bounds (" << model.domain.lower[bad] << ", "
           << model.domain.upper[bad] << "))";
        throw DomainError(os.str());
    }
}

}  // namespace pbvp
