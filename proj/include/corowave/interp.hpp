#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace corowave {

// Cubic Lagrange interpolation of cell-centered samples f_j at r_j = (j+1/2)h.
// Even reflection across r = 0 (f(-r) = f(r)); stencil clamped one-sided at the
// outer end. Fourth-order for smooth even fields, which the frame-change and
// profile-discrepancy tolerances require.
inline double interp_even(const Eigen::VectorXd& f, double h, double r) {
    const int N = static_cast<int>(f.size());
    double x = std::abs(r);
    int j = static_cast<int>(std::floor(x / h - 0.5));
    j = std::clamp(j, -2, N - 3);
    double val = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int ka = j - 1 + a;
        const double xa = (ka + 0.5) * h;
        const double fa = f[ka >= 0 ? ka : -ka - 1];
        double l = fa;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            const int kb = j - 1 + b;
            const double xb = (kb + 0.5) * h;
            l *= (x - xb) / (xa - xb);
        }
        val += l;
    }
    return val;
}

inline Eigen::VectorXd interp_even_many(const Eigen::VectorXd& f, double h,
                                        const Eigen::VectorXd& r) {
    Eigen::VectorXd out(r.size());
    for (int i = 0; i < r.size(); ++i) out[i] = interp_even(f, h, r[i]);
    return out;
}

}  // namespace corowave
