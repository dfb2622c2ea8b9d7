#pragma once

// Core value types shared across the solver library: dense matrix aliases,
// uniform time grids, sampled trajectories, and the error hierarchy.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbvp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Domain (state leaves the admissible box, or an argument is out of range).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must be inverted is numerically singular.
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or failed convergence inside a numerical kernel.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform partition of [0, tau] into n_g steps.
struct Grid {
    int n_g = 0;
    double tau = 0.0;

    Grid() = default;
    Grid(int steps, double period) : n_g(steps), tau(period) {
        if (steps <= 0 || !(period > 0.0))
            throw DomainError("Grid: need n_g >= 1 and tau > 0");
    }

    double dt() const { return tau / n_g; }
    double node(int j) const { return j * dt(); }
    int nodes() const { return n_g + 1; }

    bool operator==(const Grid& o) const { return n_g == o.n_g && tau == o.tau; }
};

/// State samples x_j on a uniform grid, stored column-per-node (n x (n_g+1)).
struct Trajectory {
    Grid grid;
    Matrix samples;     // n x (n_g + 1)
    int iteration = 0;  // which iterate produced this trajectory

    Trajectory() = default;
    Trajectory(const Grid& g, int dim)
        : grid(g), samples(Matrix::Zero(dim, g.nodes())) {}

    int dim() const { return static_cast<int>(samples.rows()); }
    auto node(int j) { return samples.col(j); }
    auto node(int j) const { return samples.col(j); }

    bool all_finite() const { return samples.allFinite(); }

    /// sup_j |x_j - y_j| in the Euclidean node norm.
    double sup_distance(const Trajectory& other) const {
        double m = 0.0;
        for (int j = 0; j < samples.cols(); ++j)
            m = std::max(m, (samples.col(j) - other.samples.col(j)).norm());
        return m;
    }
};

/// Zero trajectory on a grid (the default initial iterate).
inline Trajectory zero_trajectory(const Grid& grid, int dim) {
    return Trajectory(grid, dim);
}

}  // namespace pbvp
