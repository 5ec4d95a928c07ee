#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "corowave/grid.hpp"
#include "corowave/modal.hpp"

using namespace corowave;

namespace {

VectorXd smooth_field(const RadialGrid& g, double a, double b, double c) {
    VectorXd f(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        const double r = g.r[j];
        f[j] = a * std::exp(-b * (r - c) * (r - c));
    }
    return f;
}

}  // namespace

TEST_CASE("grid layout: cell centers and exact volume weights") {
    const RadialGrid g = RadialGrid::make(8.0, 64);
    CHECK(g.h == doctest::Approx(0.125).epsilon(1e-15));
    for (int j : {0, 1, 33, 63})
        CHECK(g.r[j] == doctest::Approx((j + 0.5) * g.h).epsilon(1e-15));
    // shell volumes telescope to r_max^n / n
    for (int n : {5, 7}) {
        const VectorXd w = cell_weights(g, n);
        CHECK(w.sum() == doctest::Approx(std::pow(8.0, n) / n).epsilon(1e-13));
        CHECK(w[0] == doctest::Approx(std::pow(g.h, n) / n).epsilon(1e-13));
        CHECK(w.minCoeff() > 0);
    }
}

TEST_CASE("flux laplacian is self-adjoint in the volume inner product") {
    const RadialGrid g = RadialGrid::make(8.0, 128);
    const VectorXd w = cell_weights(g, 5);
    const VectorXd f = smooth_field(g, 1.0, 0.7, 2.0);
    const VectorXd q = smooth_field(g, 0.6, 1.3, 4.5);
    const VectorXd Lf = laplacian_apply(g, 5, f);
    const VectorXd Lq = laplacian_apply(g, 5, q);
    const double a = wdot(Lf, q, w);
    const double b = wdot(f, Lq, w);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    // negative semidefinite with the Dirichlet closure
    CHECK(wdot(Lf, f, w) < 0);
}

TEST_CASE("laplacian consistency on a quadratic with open closure") {
    // f = r^2 has Laplacian_n f = 2n exactly for the pointwise form
    const RadialGrid g = RadialGrid::make(4.0, 64);
    VectorXd f(g.n_points);
    for (int j = 0; j < g.n_points; ++j) f[j] = g.r[j] * g.r[j];
    VectorXd out(g.n_points);
    laplacian_open_apply(g, 5, f, out);
    for (int j = 1; j + 1 < g.n_points; ++j)
        CHECK(out[j] == doctest::Approx(10.0).epsilon(1e-10));
    // upwind transport of the same quadratic: r f' = 2 r^2, second order exact
    VectorXd tr(g.n_points);
    radial_upwind_apply(g, f, tr);
    for (int j : {0, 1, 5, 40})
        CHECK(tr[j] == doctest::Approx(2.0 * f[j]).epsilon(1e-10));
}

TEST_CASE("lowest Dirichlet eigenvalue matches the tan x = x root") {
    const RadialGrid g = RadialGrid::make(8.0, 512);
    const ModalBasis b = ModalBasis::build(g, 5);
    // radial mode of -Laplacian_5 on [0, R]: lambda_0 = (x_0/R)^2, tan x_0 = x_0
    const double x0 = 4.493409457909064;
    const double lam = (x0 / 8.0) * (x0 / 8.0);
    CHECK(b.lambda(0) == doctest::Approx(lam).epsilon(1e-4));  // measured 3.9e-6
    // eigenvalues sorted, simple, positive
    for (int k = 1; k < 8; ++k) CHECK(b.lambda(k) > b.lambda(k - 1));
    CHECK(b.lambda(0) > 0);
}

TEST_CASE("modes are orthonormal and analysis inverts synthesis") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    const ModalBasis b = ModalBasis::build(g, 5);
    const VectorXd w = b.weights();
    for (int i : {0, 3, 17}) {
        for (int j : {0, 3, 17}) {
            const double p = wdot(b.mode(i), b.mode(j), w);
            CHECK(p == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
        }
    }
    const VectorXd f = smooth_field(g, 0.8, 0.5, 3.0);
    CHECK((b.synth(b.coeffs(f)) - f).cwiseAbs().maxCoeff() < 1e-10);
    // eigen relation: -L e_k = lambda_k e_k on the grid
    const VectorXd e5 = b.mode(5);
    const VectorXd Le5 = laplacian_apply(g, 5, e5);
    CHECK((Le5 + b.lambda(5) * e5).cwiseAbs().maxCoeff() < 1e-9 * b.lambda(5));
}

TEST_CASE("helmholtz solves (I - Laplacian)^p exactly on the grid") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    const ModalBasis b = ModalBasis::build(g, 5);
    const VectorXd f = smooth_field(g, 1.0, 0.9, 2.5);
    const VectorXd u1 = b.helmholtz(f, 1);
    CHECK((u1 - laplacian_apply(g, 5, u1) - f).cwiseAbs().maxCoeff() < 1e-9);
    const VectorXd u2 = b.helmholtz(f, 2);
    const VectorXd mid = u2 - laplacian_apply(g, 5, u2);
    CHECK((mid - laplacian_apply(g, 5, mid) - f).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS(b.helmholtz(f, 3));
}

TEST_CASE("heat semigroup: identity at t = 0, contraction, additivity") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    const ModalBasis b = ModalBasis::build(g, 5);
    const VectorXd f = smooth_field(g, 1.0, 0.9, 2.5);
    CHECK((b.heat(f, 0.0) - f).cwiseAbs().maxCoeff() < 1e-12);
    const VectorXd w = b.weights();
    const double n0 = std::sqrt(wdot(f, f, w));
    const VectorXd hf = b.heat(f, 0.7);
    CHECK(std::sqrt(wdot(hf, hf, w)) < std::exp(-0.7) * n0 * (1 + 1e-12));
    const VectorXd two = b.heat(b.heat(f, 0.3), 0.4);
    CHECK((two - hf).cwiseAbs().maxCoeff() < 1e-11);
    CHECK_THROWS_AS(b.heat(f, -0.1), std::domain_error);
}

TEST_CASE("sobolev norm scaling, zero state, and diagnostic split") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    const ModalBasis b = ModalBasis::build(g, 5);
    SobolevOrder ord;
    StatePair s = StatePair::zero(g.n_points);
    CHECK(b.sobolev(s, ord).total == 0.0);
    s.u = smooth_field(g, 0.5, 1.1, 2.0);
    s.u_hat = smooth_field(g, 0.2, 0.6, 3.5);
    const SobolevNorm plain = b.sobolev(s, ord);
    CHECK(plain.hk_u == 0.0);  // k-part only on request
    StatePair s2{2.0 * s.u, 2.0 * s.u_hat};
    const SobolevNorm twice = b.sobolev(s2, ord);
    CHECK(twice.total == doctest::Approx(2.0 * plain.total).epsilon(1e-12));
    const SobolevNorm diag = b.sobolev(s, ord, true);
    CHECK(diag.hk_u > 0.0);
    CHECK(diag.total == doctest::Approx(plain.total).epsilon(1e-12));
    CHECK(plain.total ==
          doctest::Approx(std::sqrt(plain.hs_u * plain.hs_u + plain.hs_v * plain.hs_v))
              .epsilon(1e-12));
}

TEST_CASE("sobolev order window is enforced") {
    SobolevOrder ord;            // s = 1.6, k = 6 admissible for n = 5
    CHECK_NOTHROW(ord.validate(5));
    SobolevOrder bad;
    bad.s = 1.2;                 // below n/2 - 1 = 1.5
    CHECK_THROWS_AS(bad.validate(5), std::invalid_argument);
    CHECK_NOTHROW(bad.validate(5, true));  // diagnostic mode relaxes the window
    SobolevOrder badk;
    badk.k = 4;                  // k must exceed n
    CHECK_THROWS_AS(badk.validate(5), std::invalid_argument);
}

TEST_CASE("basis checksum identifies grid and dimension") {
    const RadialGrid g = RadialGrid::make(8.0, 128);
    const ModalBasis a = ModalBasis::build(g, 5);
    const ModalBasis b = ModalBasis::build(g, 5);
    CHECK(a.checksum() == b.checksum());
    const ModalBasis c = ModalBasis::build(g, 7);
    CHECK(a.checksum() != c.checksum());
    const ModalBasis d = ModalBasis::build(RadialGrid::make(8.0, 256), 5);
    CHECK(a.checksum() != d.checksum());
}
