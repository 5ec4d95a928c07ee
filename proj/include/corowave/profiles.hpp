#pragma once

#include "corowave/grid.hpp"

namespace corowave {

// Self-similar blowup profile family for the corotational reduction in
// n = d + 2 ambient dimensions.
struct ProfileParams {
    int d = 3;
    double T = 1.0;

    int n() const { return d + 2; }
    void validate() const;
};

// Phi(rho) = (2/rho) atan(rho/sqrt(d-2)); Phi(0) = 2/sqrt(d-2).
double phi(double rho, int d);

// Phi_hat = Phi + rho Phi' = 2 sqrt(d-2) / (d-2 + rho^2), in closed form.
double phi_hat(double rho, int d);

// d/drho of phi_hat, closed form (used by the static residual).
double phi_hat_prime(double rho, int d);

// Exact blowup pair u_T(t,r) = Phi(r/(T-t))/(T-t), u_hat = Phi_hat(.)/(T-t)^2.
// Throws std::domain_error for t >= T.
void u_T(double t, double r, const ProfileParams& p, double& u, double& u_hat);
StatePair u_T_state(double t, const RadialGrid& grid, const ProfileParams& p);

// Gauge eigenpair of the linearized similarity operator at eigenvalue 1:
// g = 1/(xi^2 + n - 4), g_hat = xi g' + 2g = 2(n-4)/(xi^2+n-4)^2.
void gauge_mode(double xi, int n, double& g, double& g_hat);
StatePair gauge_state(const RadialGrid& xi_grid, int n);

// Residual of the static profile equation
//   Laplacian_h (scale Phi) + n0(scale Phi) - scale (2 Phi_hat + r Phi_hat')
// evaluated with the discrete Laplacian; norms restricted to r in [r_lo, r_hi].
// scale = 1 verifies the exact profile; scale = 0 vanishes identically.
struct ProfileResidual {
    VectorXd field;
    double max_norm = 0;
    double l2w = 0;
};
ProfileResidual profile_residual(const RadialGrid& grid, int d,
                                 double r_lo, double r_hi, double scale = 1.0);

}  // namespace corowave
