#include "corowave/grid.hpp"

#include <cmath>

namespace corowave {

RadialGrid RadialGrid::make(double r_max, int n_points) {
    if (r_max <= 0 || n_points < 2)
        throw std::invalid_argument("RadialGrid: need r_max > 0 and n_points >= 2");
    RadialGrid g;
    g.r_max = r_max;
    g.n_points = n_points;
    g.h = r_max / n_points;
    g.r.resize(n_points);
    for (int j = 0; j < n_points; ++j) g.r[j] = (j + 0.5) * g.h;
    return g;
}

VectorXd cell_weights(const RadialGrid& grid, int n) {
    // exact shell volumes; the midpoint rule r_j^{n-1} h loses consistency of
    // the flux Laplacian at the innermost cells
    VectorXd w(grid.n_points);
    double prev = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double next = std::pow((j + 1) * grid.h, n);
        w[j] = (next - prev) / n;
        prev = next;
    }
    return w;
}

void laplacian_apply(const RadialGrid& grid, int n, const VectorXd& f, VectorXd& out) {
    const int N = grid.n_points;
    if (f.size() != N) throw std::invalid_argument("laplacian_apply: length mismatch");
    out.resize(N);
    const double h = grid.h;
    // flux F_j = r_face^{n-1} (f_j - f_{j-1})/h through face j (at r = j h);
    // the face at r = 0 carries zero flux by the r^{n-1} weight.  Dividing by
    // the exact shell volume keeps the stencil consistent down to the first cell.
    double prev_flux = 0.0, prev_rpow = 0.0;
    for (int j = 0; j < N; ++j) {
        double next_flux;
        const double next_rpow = std::pow((j + 1) * h, n);
        if (j + 1 < N) {
            const double rf = (j + 1) * h;
            next_flux = std::pow(rf, n - 1) * (f[j + 1] - f[j]) / h;
        } else {
            // Dirichlet ghost -f_{N-1} beyond the outer face
            next_flux = std::pow(grid.r_max, n - 1) * (-2.0 * f[N - 1]) / h;
        }
        out[j] = (next_flux - prev_flux) / ((next_rpow - prev_rpow) / n);
        prev_flux = next_flux;
        prev_rpow = next_rpow;
    }
}

VectorXd laplacian_apply(const RadialGrid& grid, int n, const VectorXd& f) {
    VectorXd out;
    laplacian_apply(grid, n, f, out);
    return out;
}

void laplacian_open_apply(const RadialGrid& grid, int n, const VectorXd& f, VectorXd& out) {
    const int N = grid.n_points;
    if (f.size() != N) throw std::invalid_argument("laplacian_open_apply: length mismatch");
    out.resize(N);
    const double h = grid.h;
    // pointwise f'' + (n-1)/r f'; the even ghost f_{-1} = f_0 across r = 0 is
    // exact for the even fields this operator acts on (nodes at half-integers)
    out[0] = (f[1] - f[0]) / (h * h) + (n - 1) / grid.r[0] * (f[1] - f[0]) / (2 * h);
    for (int j = 1; j + 1 < N; ++j) {
        const double fpp = (f[j - 1] - 2 * f[j] + f[j + 1]) / (h * h);
        const double fp = (f[j + 1] - f[j - 1]) / (2 * h);
        out[j] = fpp + (n - 1) / grid.r[j] * fp;
    }
    if (N >= 4) {
        // one-sided closure at the last node: f'' by the second-order backward
        // stencil, f' by the three-point backward stencil
        const double fpp = (2 * f[N - 1] - 5 * f[N - 2] + 4 * f[N - 3] - f[N - 4]) / (h * h);
        const double fp = (3 * f[N - 1] - 4 * f[N - 2] + f[N - 3]) / (2 * h);
        out[N - 1] = fpp + (n - 1) / grid.r[N - 1] * fp;
    } else {
        out[N - 1] = 0;
    }
}

void radial_upwind_apply(const RadialGrid& grid, const VectorXd& f, VectorXd& out) {
    const int N = grid.n_points;
    out.resize(N);
    const double h = grid.h;
    // even-reflection ghosts f_{-1} = f_0, f_{-2} = f_1 keep the stencil
    // second order for even fields at the first two nodes
    out[0] = grid.r[0] * (3 * f[0] - 4 * f[0] + f[1]) / (2 * h);
    if (N > 1) out[1] = grid.r[1] * (3 * f[1] - 4 * f[0] + f[0]) / (2 * h);
    for (int j = 2; j < N; ++j)
        out[j] = grid.r[j] * (3 * f[j] - 4 * f[j - 1] + f[j - 2]) / (2 * h);
}

std::vector<double> corotational_lift(double u_value, const std::vector<double>& X) {
    double norm2 = 0;
    for (double x : X) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    std::vector<double> out(X.size() + 1, 0.0);
    if (norm == 0.0) {
        out.back() = 1.0;
        return out;
    }
    const double angle = norm * u_value;
    const double s = std::sin(angle) / norm;
    for (size_t i = 0; i < X.size(); ++i) out[i] = s * X[i];
    out.back() = std::cos(angle);
    return out;
}

}  // namespace corowave
