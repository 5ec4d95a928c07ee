#pragma once

#include "corowave/grid.hpp"

namespace corowave {

struct NonlinearityContext {
    int n = 5;
    // below this |y| the gamma-family kernels switch to series; the series
    // degrees are chosen so the switch error stays under 1e-16
    double taylor_threshold = 0.25;

    void validate() const;
};

// gamma(y) = 2y - sin 2y and derivatives
double gamma_fn(double y, double thr = 0.25);
double gamma_prime(double y);   // 2 - 2 cos 2y = 4 sin^2 y
double gamma_pp(double y);      // 4 sin 2y
double gamma_ppp(double y);     // 8 cos 2y

// gamma(y)/y^3, regular at 0 with limit 4/3
double gamma_over_y3(double y, double thr = 0.25);

// sin(y)/y and (1 - cos y)/y^2, series-protected near 0
double sinc_fn(double y);
double versinc(double y);

// sin^2(y)/y^4 - 1/y^2 = (sin^2 y - y^2)/y^4, regular at 0 with limit -1/3
double sin2_deficit(double y);

// n0(u) = (n-3)/(2 r^3) gamma(r u), the limiting value 2(n-3)/3 u^3 at r -> 0
VectorXd n0_apply(const VectorXd& u, const RadialGrid& grid,
                  const NonlinearityContext& ctx);

// linearization potential V(xi) = 8(n-4)(n-3)/(xi^2+n-4)^2; equals the
// pointwise derivative of n0 at the profile Phi
double potential_V(double xi, int n);
VectorXd potential_V_samples(const RadialGrid& xi_grid, int n);

// Quadratic remainder of n0 around Phi on a similarity grid:
//   N(K)_2 = (n-3)/(2 xi^3) [gamma(xi(Phi+K)) - gamma(xi Phi) - gamma'(xi Phi) xi K]
// evaluated in the cancellation-free form
//   (n-3)/2 [ cos(2 xi Phi) K^3 g3(xi K) + 4 Phi K^2 sinc(2 xi Phi) sinc^2(xi K) ]
// which is uniformly accurate near xi = 0 and K = 0. First component is zero.
StatePair N_perturbation(const StatePair& K, const RadialGrid& xi_grid,
                         const NonlinearityContext& ctx);
void N_perturbation_second(const VectorXd& K1, const VectorXd& phi_samples,
                           const RadialGrid& xi_grid, const NonlinearityContext& ctx,
                           VectorXd& out);

// Energy: flat part 1/2 (||u_hat||_w^2 + <-Laplacian_h u, u>_w); with
// geometric=true adds the corotational target term
//   (n-3)/2 * integral (sin^2(ru) - (ru)^2)/r^4 r^{n-1} dr
// making the total conserved by the nonlinear flow.
double energy(const StatePair& state, const RadialGrid& grid, int n,
              bool geometric = false);

}  // namespace corowave
