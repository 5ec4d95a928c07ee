#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

namespace corowave {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Cell-centered radial grid: nodes r_j = (j+1/2)h, j = 0..n_points-1.
// No node sits at r = 0, so 1/r^3 factors stay finite everywhere.
struct RadialGrid {
    double r_max = 0.0;
    int n_points = 0;
    double h = 0.0;
    VectorXd r;

    static RadialGrid make(double r_max, int n_points);
};

// (u, du/dt) sampled on a shared grid. Even extension across r = 0 is implied.
struct StatePair {
    VectorXd u;
    VectorXd u_hat;

    StatePair() = default;
    StatePair(VectorXd u_, VectorXd u_hat_) : u(std::move(u_)), u_hat(std::move(u_hat_)) {}
    static StatePair zero(int n) { return {VectorXd::Zero(n), VectorXd::Zero(n)}; }
    int size() const { return static_cast<int>(u.size()); }
};

// Quadrature weights of the radial measure: exact shell volumes
// w_j = (r_{j+1/2}^n - r_{j-1/2}^n)/n with faces at multiples of h.
VectorXd cell_weights(const RadialGrid& grid, int n);

inline double wdot(const VectorXd& f, const VectorXd& g, const VectorXd& w) {
    return (f.array() * g.array() * w.array()).sum();
}

inline double pair_wdot(const StatePair& a, const StatePair& b, const VectorXd& w) {
    return wdot(a.u, b.u, w) + wdot(a.u_hat, b.u_hat, w);
}

inline double pair_wnorm(const StatePair& a, const VectorXd& w) {
    return std::sqrt(pair_wdot(a, a, w));
}

// Conservative second-order radial Laplacian (1/r^{n-1}) d_r (r^{n-1} d_r f)
// with even reflection at the origin cell (zero flux through r = 0) and a
// homogeneous Dirichlet ghost at the outer face.
void laplacian_apply(const RadialGrid& grid, int n, const VectorXd& f, VectorXd& out);
VectorXd laplacian_apply(const RadialGrid& grid, int n, const VectorXd& f);

// Variant for similarity grids: pointwise f'' + (n-1)/r f' with even ghosts
// across the origin, no outer boundary condition; the last node uses
// one-sided interior stencils (outflow closure, characteristics leave).
void laplacian_open_apply(const RadialGrid& grid, int n, const VectorXd& f, VectorXd& out);

// Second-order upwind (backward) r d_r f with even-reflection ghosts at the
// origin; used for the similarity-frame transport terms whose characteristic
// speed is nonnegative.
void radial_upwind_apply(const RadialGrid& grid, const VectorXd& f, VectorXd& out);

// Map (u, X) to the corotational point (sin(|X|u) X/|X|, cos(|X|u)) on S^d.
std::vector<double> corotational_lift(double u_value, const std::vector<double>& X);

}  // namespace corowave
