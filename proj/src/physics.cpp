#include "corowave/physics.hpp"

#include <cmath>

#include "corowave/profiles.hpp"

namespace corowave {

void NonlinearityContext::validate() const {
    if (n < 5) throw std::invalid_argument("NonlinearityContext: need n >= 5");
    if (!(taylor_threshold > 0 && taylor_threshold <= 0.5))
        throw std::invalid_argument("NonlinearityContext: taylor_threshold in (0, 0.5]");
}

// gamma(y)/y^3 = 4/3 - 4y^2/15 + 8y^4/315 - ...; degree matched to keep the
// switch error below 1e-16 for thresholds up to 0.5
double gamma_over_y3(double y, double thr) {
    const double y2 = y * y;
    if (std::abs(y) < thr) {
        return 4.0 / 3.0 +
               y2 * (-4.0 / 15.0 +
               y2 * (8.0 / 315.0 +
               y2 * (-4.0 / 2835.0 +
               y2 * (8.0 / 155925.0 +
               y2 * (-8.0 / 6081075.0 +
               y2 * (16.0 / 638512875.0))))));
    }
    return (2.0 * y - std::sin(2.0 * y)) / (y2 * y);
}

double gamma_fn(double y, double thr) {
    if (std::abs(y) < thr) return y * y * y * gamma_over_y3(y, thr);
    return 2.0 * y - std::sin(2.0 * y);
}

double gamma_prime(double y) { return 2.0 - 2.0 * std::cos(2.0 * y); }
double gamma_pp(double y) { return 4.0 * std::sin(2.0 * y); }
double gamma_ppp(double y) { return 8.0 * std::cos(2.0 * y); }

double sinc_fn(double y) {
    const double y2 = y * y;
    if (std::abs(y) < 0.5) {
        return 1.0 +
               y2 * (-1.0 / 6.0 +
               y2 * (1.0 / 120.0 +
               y2 * (-1.0 / 5040.0 +
               y2 * (1.0 / 362880.0 +
               y2 * (-1.0 / 39916800.0 +
               y2 * (1.0 / 6227020800.0))))));
    }
    return std::sin(y) / y;
}

double versinc(double y) {
    const double y2 = y * y;
    if (std::abs(y) < 0.5) {
        return 0.5 +
               y2 * (-1.0 / 24.0 +
               y2 * (1.0 / 720.0 +
               y2 * (-1.0 / 40320.0 +
               y2 * (1.0 / 3628800.0 +
               y2 * (-1.0 / 479001600.0 +
               y2 * (1.0 / 87178291200.0))))));
    }
    return (1.0 - std::cos(y)) / y2;
}

double sin2_deficit(double y) {
    const double y2 = y * y;
    if (std::abs(y) < 0.5) {
        // (sin^2 y - y^2)/y^4 = -1/3 + 2y^2/45 - y^4/315 + 2y^6/14175 - ...
        return -1.0 / 3.0 +
               y2 * (2.0 / 45.0 +
               y2 * (-1.0 / 315.0 +
               y2 * (2.0 / 14175.0 +
               y2 * (-2.0 / 467775.0 +
               y2 * (4.0 / 42567525.0)))));
    }
    const double s = std::sin(y);
    return (s * s - y2) / (y2 * y2);
}

VectorXd n0_apply(const VectorXd& u, const RadialGrid& grid,
                  const NonlinearityContext& ctx) {
    const int N = grid.n_points;
    if (u.size() != N) throw std::invalid_argument("n0_apply: length mismatch");
    VectorXd out(N);
    const double pre = 0.5 * (ctx.n - 3);
    for (int j = 0; j < N; ++j) {
        const double r = grid.r[j];
        const double y = r * u[j];
        if (std::abs(y) < ctx.taylor_threshold) {
            out[j] = pre * u[j] * u[j] * u[j] * gamma_over_y3(y, ctx.taylor_threshold);
        } else {
            out[j] = pre * (2.0 * y - std::sin(2.0 * y)) / (r * r * r);
        }
    }
    return out;
}

double potential_V(double xi, int n) {
    const double q = xi * xi + n - 4;
    return 8.0 * (n - 4) * (n - 3) / (q * q);
}

VectorXd potential_V_samples(const RadialGrid& xi_grid, int n) {
    VectorXd out(xi_grid.n_points);
    for (int j = 0; j < xi_grid.n_points; ++j) out[j] = potential_V(xi_grid.r[j], n);
    return out;
}

void N_perturbation_second(const VectorXd& K1, const VectorXd& phi_samples,
                           const RadialGrid& xi_grid, const NonlinearityContext& ctx,
                           VectorXd& out) {
    const int N = xi_grid.n_points;
    out.resize(N);
    const double pre = 0.5 * (ctx.n - 3);
    for (int j = 0; j < N; ++j) {
        const double xi = xi_grid.r[j];
        const double a = xi * phi_samples[j];
        const double K = K1[j];
        const double b = xi * K;
        // gamma(a+b) - gamma(a) - gamma'(a) b
        //   = cos(2a) gamma(b) + sin(2a) gamma'(b)/2, divided by xi^3:
        const double sK = sinc_fn(b);
        out[j] = pre * (std::cos(2.0 * a) * K * K * K * gamma_over_y3(b, ctx.taylor_threshold) +
                        4.0 * phi_samples[j] * K * K * sinc_fn(2.0 * a) * sK * sK);
    }
}

StatePair N_perturbation(const StatePair& K, const RadialGrid& xi_grid,
                         const NonlinearityContext& ctx) {
    const int N = xi_grid.n_points;
    VectorXd phi_s(N);
    const int d = ctx.n - 2;
    for (int j = 0; j < N; ++j) phi_s[j] = phi(xi_grid.r[j], d);
    StatePair out = StatePair::zero(N);
    N_perturbation_second(K.u, phi_s, xi_grid, ctx, out.u_hat);
    return out;
}

double energy(const StatePair& state, const RadialGrid& grid, int n, bool geometric) {
    const int N = grid.n_points;
    const double h = grid.h;
    const VectorXd w = cell_weights(grid, n);
    double kin = 0;
    for (int j = 0; j < N; ++j) kin += state.u_hat[j] * state.u_hat[j] * w[j];

    // <-Laplacian_h u, u>_w as the face sum with the Dirichlet ghost
    double grad = 0;
    for (int j = 0; j + 1 < N; ++j) {
        const double rf = (j + 1) * h;
        const double df = state.u[j + 1] - state.u[j];
        grad += std::pow(rf, n - 1) * df * df / h;
    }
    {
        const double df = -2.0 * state.u[N - 1];
        grad += std::pow(grid.r_max, n - 1) * df * df / h / 2.0;
    }

    double total = 0.5 * (kin + grad);
    if (geometric) {
        double geo = 0;
        for (int j = 0; j < N; ++j) {
            const double y = grid.r[j] * state.u[j];
            const double u4 = std::pow(state.u[j], 4);
            geo += u4 * sin2_deficit(y) * w[j];
        }
        total += 0.5 * (n - 3) * geo;
    }
    return total;
}

}  // namespace corowave
