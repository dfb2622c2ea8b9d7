#pragma once

// Analytical convergence certification: exponential growth bounds, Lipschitz
// bounds, the contraction factor of the fixed-point scheme, the Neumann
// bound for the variational mass matrix, and the Newton-Kantorovich
// constants with their rate and uniqueness radii.

#include "pbvp/bvp.hpp"
#include "pbvp/model.hpp"

namespace pbvp {

enum class BoundSource { kDefault, kUser, kSampled };

inline const char* to_string(BoundSource s) {
    switch (s) {
        case BoundSource::kDefault: return "default";
        case BoundSource::kUser: return "user";
        case BoundSource::kSampled: return "sampled";
    }
    return "?";
}

/// |e^{tA}| <= M e^{omega |t|} on [-tau, tau].
struct GrowthBounds {
    double M = 1.0;
    double omega = 0.0;
    BoundSource source = BoundSource::kDefault;
};

/// Default (M, omega) = (1, |A|); user overrides are spot-verified at 20
/// samples of [-tau, tau] and rejected (ConfigError) with the worst (t, ratio).
GrowthBounds growth_bounds(const Matrix& A, double tau,
                           std::optional<std::pair<double, double>> override = {});

struct LipschitzBound {
    double L = 0.0;
    BoundSource source = BoundSource::kUser;
};

/// User value passed through, or max spectral norm of g' over a lattice of
/// points_per_dim^n points covering the closed box Dprime (heuristic).
/// A nonzero seed jitters each interior lattice point within its cell for a
/// reproducible randomized sweep.
LipschitzBound lipschitz_bound(const SystemModel& model, const Box& Dprime,
                               std::optional<double> user_value,
                               int points_per_dim = 10, unsigned seed = 0);

/// phi_L(t) = sqrt(n) e^{(|A| + L) t}, the growth envelope of the
/// variational fundamental matrix.
double phi_L(int n, double A_norm, double L, double t);

struct ContractionCheck {
    bool a1_ok = false;              // dominant linearization holds
    bool a4_ok = false;              // q < 1
    std::optional<double> q;         // contraction factor
};

/// q = L M (e^{omega tau} - 1)(1 + M |B_tau^{-1}| e^{omega tau} |M1|) / omega.
ContractionCheck check_contraction(const Matrix& A, double tau, const BoundaryCondition& bc,
                                   double M, double omega, double L);

struct MassMatrixCheck {
    double S = 0.0;
    bool a5_ok = false;
};

/// S = sqrt(n) M L R_tau (e^{(|A|+L+omega) tau} - 1) / (|A|+L+omega);
/// S < 1 certifies |M_x^{-1}| <= 1/(1-S).
MassMatrixCheck check_mass_matrix_bound(int n, double M, double L, double omega, double A_norm,
                                        double R_tau, double tau);

struct RhoConstants {
    double rho0 = 0.0;
    std::optional<double> rho1;  // needs S < 1
    std::optional<double> rho2;  // needs a Hessian bound
};

/// rho0/rho1/rho2 from the growth data and the initial iterate; the sup of
/// |g(x(t))| is taken over the grid nodes of x0.
RhoConstants compute_rhos(const SystemModel& model, const ControlSchedule& schedule,
                          const Trajectory& x0, double M, double omega, double L,
                          double R_tau, double S, std::optional<double> hessian_bound);

struct NewtonCheck {
    double h = 0.0;
    double eta = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;  // +inf when h == 0
    bool h_ok = false;
    std::vector<double> rate_bound_modified;   // k = 0..20
    std::vector<double> rate_bound_classical;  // k = 0..20
};

/// h = rho0 rho1^2 rho2, eta = rho0 rho1, r0 = (1 - sqrt(1-2h))/h * eta,
/// r1 = (1 + sqrt(1-2h))/h * eta; h_ok requires h <= 1/2 and r0 <= r.
NewtonCheck check_newton(double rho0, double rho1, double rho2, double r);

struct Certificate {
    bool a1_ok = false;
    bool a4_ok = false;
    bool a5_ok = false;
    bool h_ok = false;
    std::optional<double> q;
    std::optional<double> S;
    std::optional<double> R_tau;
    std::optional<double> B_tau_inv_norm;
    double M = 1.0;
    double omega = 0.0;
    BoundSource growth_source = BoundSource::kDefault;
    std::optional<double> L;
    BoundSource L_source = BoundSource::kUser;
    std::optional<double> hessian_bound;
    BoundSource hessian_source = BoundSource::kUser;
    std::optional<double> rho0, rho1, rho2;
    std::optional<double> h, eta, r0, r1;
    std::vector<double> rate_bound_modified;
    std::vector<double> rate_bound_classical;
    Box working_box;  // the D' used for sampled bounds
    bool heuristic = false;  // any sampled bound involved
};

struct CertifyOptions {
    Box working_box;                       // D' for L sampling; required
    std::optional<std::pair<double, double>> growth_override;  // (M, omega)
    std::optional<double> L_user;
    std::optional<double> hessian_user;
    double ball_radius = 1.0;              // r for the r0 <= r check
    int lattice_points_per_dim = 10;
    unsigned seed = 0;                     // jitter seed for sampled bounds
    std::optional<Trajectory> x0;          // default zero trajectory on a small grid
    int rho_grid_steps = 1024;             // grid for sup |g(x0(t))|
};

/// Runs every check and assembles the full certificate.
Certificate certify(const SystemModel& model, const ControlSchedule& schedule,
                    const BoundaryCondition& bc, const CertifyOptions& opts);

}  // namespace pbvp
