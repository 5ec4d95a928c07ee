#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "corowave/profiles.hpp"
#include "corowave/physics.hpp"

using namespace corowave;

TEST_CASE("closed forms at the origin and fixed points") {
    CHECK(phi(0.0, 3) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(phi(0.0, 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(phi(0.0, 6) == doctest::Approx(1.0).epsilon(1e-13));
    // gamma(pi/2) = 2(pi/2) - sin(pi) = pi
    CHECK(gamma_fn(M_PI / 2.0) == doctest::Approx(M_PI).epsilon(1e-14));
    double g = 0, gh = 0;
    gauge_mode(0.0, 5, g, gh);
    CHECK(g == doctest::Approx(1.0).epsilon(1e-14));       // 1/(n-4), n = 5
    CHECK(gh == doctest::Approx(2.0).epsilon(1e-14));      // 2(n-4)/(n-4)^2
    gauge_mode(0.0, 7, g, gh);
    CHECK(g == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("phi matches its arctangent and series forms") {
    for (int d : {3, 4, 5, 6}) {
        const double s = std::sqrt(double(d - 2));
        for (double rho : {0.3, 1.0, 2.7, 8.0})
            CHECK(phi(rho, d) ==
                  doctest::Approx(2.0 / rho * std::atan(rho / s)).epsilon(1e-14));
    }
    // Taylor branch near zero agrees with the arctangent branch across the seam
    for (double rho : {1e-9, 5e-9, 2e-8})
        CHECK(phi(rho, 3) == doctest::Approx(2.0 / rho * std::atan(rho)).epsilon(1e-12));
}

TEST_CASE("phi_hat equals phi + rho phi' by finite differences") {
    const double eps = 1e-6;
    for (int d : {3, 5}) {
        for (double rho : {0.5, 1.2, 3.3, 6.0}) {
            const double fp = (phi(rho + eps, d) - phi(rho - eps, d)) / (2 * eps);
            CHECK(phi_hat(rho, d) == doctest::Approx(phi(rho, d) + rho * fp).epsilon(1e-8));
            const double fhp =
                (phi_hat(rho + eps, d) - phi_hat(rho - eps, d)) / (2 * eps);
            CHECK(phi_hat_prime(rho, d) == doctest::Approx(fhp).epsilon(1e-8));
        }
    }
}

TEST_CASE("phi monotonicity and the rho phi limit") {
    double prev = phi(0.0, 3);
    for (int i = 1; i <= 400; ++i) {
        const double rho = 0.05 * i;
        const double cur = phi(rho, 3);
        CHECK(cur < prev);               // Phi strictly decreasing
        CHECK(rho * cur < M_PI);         // rho Phi increases toward pi
        prev = cur;
    }
    CHECK(1e4 * phi(1e4, 3) == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("u_T pair: u_hat is the exact time derivative") {
    const RadialGrid g = RadialGrid::make(6.0, 64);
    ProfileParams p;
    p.d = 3;
    p.T = 1.3;
    const double t = 0.4, dt = 1e-6;
    const StatePair s = u_T_state(t, g, p);
    const StatePair sp = u_T_state(t + dt, g, p);
    const StatePair sm = u_T_state(t - dt, g, p);
    for (int j : {0, 10, 31, 63}) {
        const double fd = (sp.u[j] - sm.u[j]) / (2 * dt);
        CHECK(s.u_hat[j] == doctest::Approx(fd).epsilon(1e-7));
        CHECK(s.u[j] == doctest::Approx(phi(g.r[j] / (p.T - t), p.d) / (p.T - t))
                            .epsilon(1e-14));
    }
}

TEST_CASE("u_T rejects t >= T and bad parameters") {
    ProfileParams p;
    double u, uh;
    CHECK_THROWS_AS(u_T(1.0, 0.5, p, u, uh), std::domain_error);
    CHECK_THROWS_AS(u_T(1.5, 0.5, p, u, uh), std::domain_error);
    ProfileParams bad;
    bad.d = 2;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("profile residual vanishes at fourth order for the exact profile") {
    const RadialGrid g1 = RadialGrid::make(8.0, 1024);  // h = 1/128
    const RadialGrid g2 = RadialGrid::make(8.0, 2048);  // h = 1/256
    const ProfileResidual r1 = profile_residual(g1, 3, g1.h / 2, 5.0);
    const ProfileResidual r2 = profile_residual(g2, 3, g2.h / 2, 5.0);
    CHECK(r1.max_norm < 2e-7);      // measured 1.106e-7
    CHECK(r2.max_norm < 2e-8);
    CHECK(r1.max_norm / r2.max_norm > 3.5);
    CHECK(r1.l2w < r1.max_norm);    // weighted mean below the sup
}

TEST_CASE("profile residual detects a wrong profile and accepts zero") {
    const RadialGrid g = RadialGrid::make(8.0, 1024);
    const ProfileResidual z = profile_residual(g, 3, g.h / 2, 5.0, 0.0);
    CHECK(z.max_norm == 0.0);
    CHECK(z.l2w == 0.0);
    const ProfileResidual wrong = profile_residual(g, 3, g.h / 2, 5.0, 1.1);
    CHECK(wrong.max_norm > 1e-2);
}

TEST_CASE("gauge_state samples the closed form") {
    const RadialGrid xg = RadialGrid::make(8.0, 64);
    const StatePair gs = gauge_state(xg, 5);
    for (int j : {0, 17, 63}) {
        double g, gh;
        gauge_mode(xg.r[j], 5, g, gh);
        CHECK(gs.u[j] == g);
        CHECK(gs.u_hat[j] == gh);
    }
}
