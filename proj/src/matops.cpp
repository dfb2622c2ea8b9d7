#include "pbvp/matops.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace pbvp {

Matrix mat_exp(const Matrix& A, double t) {
    if (!A.allFinite() || !std::isfinite(t))
        throw NumericsError("mat_exp: non-finite input");
    return (t * A).exp();
}

double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

double rcond(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& s = svd.singularValues();
    double smax = s(0);
    double smin = s(s.size() - 1);
    if (smax == 0.0) return 0.0;
    return smin / smax;
}

Matrix solve_linear(const Matrix& A, const Matrix& B) {
    if (A.rows() != A.cols()) throw DomainError("solve_linear: A must be square");
    double rc = rcond(A);
    if (rc < kRcondFloor) {
        std::ostringstream os;
        os << "solve_linear: matrix is numerically singular (rcond = " << rc << ")";
        throw ConditioningError(os.str());
    }
    return A.partialPivLu().solve(B);
}

MatExpCache build_matexp_cache(const Matrix& A, const Grid& grid) {
    MatExpCache cache;
    cache.grid = grid;
    cache.E_plus.reserve(grid.nodes());
    cache.E_minus.reserve(grid.nodes());
    const int n = static_cast<int>(A.rows());
    cache.E_plus.push_back(Matrix::Identity(n, n));
    cache.E_minus.push_back(Matrix::Identity(n, n));
    for (int j = 1; j < grid.nodes(); ++j) {
        double tj = grid.node(j);
        cache.E_plus.push_back(mat_exp(A, tj));
        cache.E_minus.push_back(mat_exp(A, -tj));
    }
    return cache;
}

namespace {

// One classical RK4 step for M' = S(t) * M (sign = +1) or M' = -M * S(t)
// (sign = -1, the adjoint), where S(t) = A + G(t) and G is linear on the step.
Matrix rk4_step(const Matrix& M, const Matrix& S0, const Matrix& Sh, const Matrix& S1,
                double h, bool adjoint) {
    auto rhs = [&](const Matrix& S, const Matrix& X) -> Matrix {
        return adjoint ? Matrix(-X * S) : Matrix(S * X);
    };
    Matrix k1 = rhs(S0, M);
    Matrix k2 = rhs(Sh, M + 0.5 * h * k1);
    Matrix k3 = rhs(Sh, M + 0.5 * h * k2);
    Matrix k4 = rhs(S1, M + h * k3);
    return M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FundamentalMatrix fundamental_matrix(const SystemModel& model, const Trajectory& x,
                                     const Grid& grid) {
    if (!(x.grid == grid))
        throw DomainError("fundamental_matrix: trajectory grid mismatch");
    const int n = model.n;
    FundamentalMatrix fm;
    fm.grid = grid;
    fm.Phi.reserve(grid.nodes());
    fm.Phi_inv.reserve(grid.nodes());
    fm.Phi.push_back(Matrix::Identity(n, n));
    fm.Phi_inv.push_back(Matrix::Identity(n, n));

    const double h = grid.dt();
    Matrix Gprev = model.A + eval_g_jac(model, x.node(0));
    for (int j = 1; j < grid.nodes(); ++j) {
        Matrix Gnext = model.A + eval_g_jac(model, x.node(j));
        Matrix Gmid = 0.5 * (Gprev + Gnext);  // linear interpolation at the midpoint
        Matrix Phi = rk4_step(fm.Phi.back(), Gprev, Gmid, Gnext, h, false);
        Matrix PhiI = rk4_step(fm.Phi_inv.back(), Gprev, Gmid, Gnext, h, true);
        if (!Phi.allFinite() || !PhiI.allFinite())
            throw NumericsError("fundamental_matrix: divergence at node " + std::to_string(j));
        fm.Phi.push_back(std::move(Phi));
        fm.Phi_inv.push_back(std::move(PhiI));
        Gprev = std::move(Gnext);
    }
    return fm;
}

FundamentalMatrix fundamental_matrix_autonomous(const SystemModel& model, const Vector& x0,
                                                const Grid& grid) {
    const Matrix B = model.A + eval_g_jac(model, x0);
    FundamentalMatrix fm;
    fm.grid = grid;
    fm.Phi.reserve(grid.nodes());
    fm.Phi_inv.reserve(grid.nodes());
    const int n = model.n;
    fm.Phi.push_back(Matrix::Identity(n, n));
    fm.Phi_inv.push_back(Matrix::Identity(n, n));
    for (int j = 1; j < grid.nodes(); ++j) {
        double tj = grid.node(j);
        fm.Phi.push_back(mat_exp(B, tj));
        fm.Phi_inv.push_back(mat_exp(B, -tj));
    }
    return fm;
}

}  // namespace pbvp
