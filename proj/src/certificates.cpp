#include "pbvp/certificates.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pbvp {

GrowthBounds growth_bounds(const Matrix& A, double tau,
                           std::optional<std::pair<double, double>> override) {
    GrowthBounds gb;
    if (!override) {
        gb.M = 1.0;
        double nA = spectral_norm(A);
        gb.omega = nA > 0.0 ? nA : 1.0;  // any positive omega is valid for A = 0
        gb.source = BoundSource::kDefault;
        return gb;
    }
    const auto [M, omega] = *override;
    if (!(M >= 1.0) || !(omega > 0.0))
        throw ConfigError("growth_bounds: override needs M >= 1 and omega > 0");
    double worst_ratio = 0.0;
    double worst_t = 0.0;
    const int samples = 20;
    for (int i = 0; i < samples; ++i) {
        double t = -tau + (2.0 * tau) * i / (samples - 1);
        double lhs = spectral_norm(mat_exp(A, t));
        double rhs = M * std::exp(omega * std::abs(t));
        double ratio = lhs / rhs;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_t = t;
        }
    }
    if (worst_ratio > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "growth_bounds: override (M = " << M << ", omega = " << omega
           << ") rejected: |e^{tA}| exceeds M e^{omega |t|} at t = " << worst_t
           << " (ratio " << worst_ratio << ")";
        throw ConfigError(os.str());
    }
    gb.M = M;
    gb.omega = omega;
    gb.source = BoundSource::kUser;
    return gb;
}

LipschitzBound lipschitz_bound(const SystemModel& model, const Box& Dprime,
                               std::optional<double> user_value, int points_per_dim,
                               unsigned seed) {
    if (user_value) {
        if (*user_value < 0.0) throw ConfigError("lipschitz_bound: L must be nonnegative");
        return {*user_value, BoundSource::kUser};
    }
    const int n = model.n;
    if (Dprime.dim() != n) throw ConfigError("lipschitz_bound: box dimension mismatch");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(Dprime.lower[i]) || !std::isfinite(Dprime.upper[i]) ||
            !(Dprime.lower[i] < Dprime.upper[i]))
            throw ConfigError("lipschitz_bound: sampling needs a bounded box with lower < upper");

    const int m = std::max(2, points_per_dim);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<int> idx(n, 0);
    Vector x(n);
    double L = 0.0;
    while (true) {
        for (int i = 0; i < n; ++i) {
            const double cell = (Dprime.upper[i] - Dprime.lower[i]) / (m - 1);
            double xi = Dprime.lower[i] + cell * idx[i];
            if (seed != 0 && idx[i] > 0 && idx[i] < m - 1) xi += cell * jitter(rng);
            x[i] = xi;
        }
        L = std::max(L, spectral_norm(eval_g_jac(model, x)));  // throws on domain exit
        int d = 0;
        while (d < n && ++idx[d] == m) idx[d++] = 0;
        if (d == n) break;
    }
    return {L, BoundSource::kSampled};
}

double phi_L(int n, double A_norm, double L, double t) {
    return std::sqrt(static_cast<double>(n)) * std::exp((A_norm + L) * t);
}

ContractionCheck check_contraction(const Matrix& A, double tau, const BoundaryCondition& bc,
                                   double M, double omega, double L) {
    ContractionCheck out;
    BoundaryMatrixBundle bundle;
    try {
        bundle = boundary_matrices(bc, A, tau);
    } catch (const ConditioningError&) {
        out.a1_ok = false;
        return out;
    }
    out.a1_ok = bundle.R_tau.has_value();
    if (!bundle.B_tau_inv_norm) return out;
    const double B0_norm = spectral_norm(bc.M1);  // norm of B restricted to x(0) = 0
    const double q = L * M * (std::exp(omega * tau) - 1.0) *
                     (1.0 + M * (*bundle.B_tau_inv_norm) * std::exp(omega * tau) * B0_norm) /
                     omega;
    out.q = q;
    out.a4_ok = out.a1_ok && q < 1.0;
    return out;
}

MassMatrixCheck check_mass_matrix_bound(int n, double M, double L, double omega, double A_norm,
                                        double R_tau, double tau) {
    const double p = A_norm + L + omega;
    MassMatrixCheck out;
    out.S = std::sqrt(static_cast<double>(n)) * M * L * R_tau * (std::exp(p * tau) - 1.0) / p;
    out.a5_ok = out.S < 1.0;
    return out;
}

RhoConstants compute_rhos(const SystemModel& model, const ControlSchedule& schedule,
                          const Trajectory& x0, double M, double omega, double L,
                          double R_tau, double S, std::optional<double> hessian_bound) {
    const double tau = schedule.tau;
    const double grow = M * (std::exp(omega * tau) - 1.0) *
                        (1.0 + M * R_tau * std::exp(omega * tau)) / omega;

    double sup_x = 0.0, sup_g = 0.0;
    for (int j = 0; j < x0.samples.cols(); ++j) {
        sup_x = std::max(sup_x, x0.node(j).norm());
        sup_g = std::max(sup_g, eval_g(model, x0.node(j)).norm());
    }

    RhoConstants out;
    out.rho0 = sup_x + grow * (schedule.sup_norm() + sup_g);
    if (S < 1.0) {
        const double A_norm = spectral_norm(model.A);
        const double phi = phi_L(model.n, A_norm, L, tau);
        const double X = L * M * R_tau * (std::exp(omega * tau) - 1.0) * phi /
                         ((1.0 - S) * omega);
        const double Y = L * phi * (phi - std::sqrt(static_cast<double>(model.n))) /
                         (A_norm + L);
        out.rho1 = 1.0 + X + Y * (1.0 + X);
    }
    if (hessian_bound)
        out.rho2 = std::sqrt(static_cast<double>(model.n)) * (*hessian_bound) * grow;
    return out;
}

NewtonCheck check_newton(double rho0, double rho1, double rho2, double r) {
    if (rho0 < 0.0 || rho1 < 0.0 || rho2 < 0.0 || r <= 0.0)
        throw ConfigError("check_newton: inputs must be nonnegative, r positive");
    NewtonCheck out;
    out.h = rho0 * rho1 * rho1 * rho2;
    out.eta = rho0 * rho1;
    const int kmax = 20;
    out.rate_bound_modified.resize(kmax + 1);
    out.rate_bound_classical.resize(kmax + 1);
    if (out.h == 0.0) {
        out.r0 = out.eta;  // limit of (1 - sqrt(1-2h))/h as h -> 0
        out.r1 = std::numeric_limits<double>::infinity();
        out.h_ok = out.r0 <= r;
        for (int k = 0; k <= kmax; ++k) {
            out.rate_bound_modified[k] = k == 0 ? out.eta : 0.0;
            out.rate_bound_classical[k] = k == 0 ? 2.0 * out.eta : 0.0;
        }
        return out;
    }
    if (out.h <= 0.5) {
        const double s = std::sqrt(1.0 - 2.0 * out.h);
        out.r0 = (1.0 - s) / out.h * out.eta;
        out.r1 = (1.0 + s) / out.h * out.eta;
        out.h_ok = out.r0 <= r;
        for (int k = 0; k <= kmax; ++k) {
            out.rate_bound_modified[k] = out.eta / out.h * std::pow(1.0 - s, k + 1);
            out.rate_bound_classical[k] =
                std::pow(2.0, 1.0 - k) * std::pow(2.0 * out.h, std::pow(2.0, k) - 1.0) * out.eta;
        }
    } else {
        out.r0 = std::numeric_limits<double>::quiet_NaN();
        out.r1 = std::numeric_limits<double>::quiet_NaN();
        out.h_ok = false;
        std::fill(out.rate_bound_modified.begin(), out.rate_bound_modified.end(),
                  std::numeric_limits<double>::quiet_NaN());
        std::fill(out.rate_bound_classical.begin(), out.rate_bound_classical.end(),
                  std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

Certificate certify(const SystemModel& model, const ControlSchedule& schedule,
                    const BoundaryCondition& bc, const CertifyOptions& opts) {
    Certificate cert;
    cert.working_box = opts.working_box;

    const GrowthBounds gb = growth_bounds(model.A, schedule.tau, opts.growth_override);
    cert.M = gb.M;
    cert.omega = gb.omega;
    cert.growth_source = gb.source;

    const LipschitzBound lb = lipschitz_bound(model, opts.working_box, opts.L_user,
                                              opts.lattice_points_per_dim, opts.seed);
    cert.L = lb.L;
    cert.L_source = lb.source;

    if (opts.hessian_user) {
        cert.hessian_bound = opts.hessian_user;
        cert.hessian_source = BoundSource::kUser;
    } else if (model.hessian_bound) {
        cert.hessian_bound = model.hessian_bound;
        cert.hessian_source = BoundSource::kUser;
    }
    cert.heuristic = (cert.L_source == BoundSource::kSampled);

    try {
        BoundaryMatrixBundle bundle = boundary_matrices(bc, model.A, schedule.tau);
        cert.R_tau = bundle.R_tau;
        cert.B_tau_inv_norm = bundle.B_tau_inv_norm;
    } catch (const ConditioningError&) {
        cert.a1_ok = false;
        return cert;  // nothing else is computable without the linearization
    }
    cert.a1_ok = cert.R_tau.has_value();

    const ContractionCheck cc =
        check_contraction(model.A, schedule.tau, bc, cert.M, cert.omega, *cert.L);
    cert.q = cc.q;
    cert.a4_ok = cc.a4_ok;

    if (cert.R_tau) {
        const double A_norm = spectral_norm(model.A);
        const MassMatrixCheck mm = check_mass_matrix_bound(model.n, cert.M, *cert.L, cert.omega,
                                                           A_norm, *cert.R_tau, schedule.tau);
        cert.S = mm.S;
        cert.a5_ok = mm.a5_ok;

        Trajectory x0 = opts.x0 ? *opts.x0
                                : zero_trajectory(Grid(opts.rho_grid_steps, schedule.tau), model.n);
        const RhoConstants rho = compute_rhos(model, schedule, x0, cert.M, cert.omega, *cert.L,
                                              *cert.R_tau, *cert.S, cert.hessian_bound);
        cert.rho0 = rho.rho0;
        cert.rho1 = rho.rho1;
        cert.rho2 = rho.rho2;

        if (rho.rho1 && rho.rho2) {
            const NewtonCheck nc = check_newton(rho.rho0, *rho.rho1, *rho.rho2, opts.ball_radius);
            cert.h = nc.h;
            cert.eta = nc.eta;
            cert.r0 = nc.r0;
            cert.r1 = nc.r1;
            cert.h_ok = nc.h_ok;
            cert.rate_bound_modified = nc.rate_bound_modified;
            cert.rate_bound_classical = nc.rate_bound_classical;
        }
    }
    return cert;
}

}  // namespace pbvp
