#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "corowave/fitting.hpp"
#include "corowave/physics.hpp"
#include "corowave/profiles.hpp"
#include "corowave/solver.hpp"

using namespace corowave;

TEST_CASE("blowup-time fit is exact on an exact hyperbola") {
    std::vector<double> t, u;
    for (int i = 0; i < 80; ++i) {
        t.push_back(0.01 * i);
        u.push_back(1.0 / (1.3 - t.back()));
    }
    const BlowupFit f = fit_blowup_time(t, u, 50, 5);
    CHECK(f.T_hat == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(f.monotone);
    CHECK(f.drift < 1e-9);
    const BlowupFit g = estimate_T_tilde(t, u, 50, 5);
    CHECK(g.T_hat == doctest::Approx(f.T_hat).epsilon(1e-14));
}

TEST_CASE("blowup-time fit rejects bad input") {
    std::vector<double> t, u;
    for (int i = 0; i < 30; ++i) {
        t.push_back(0.01 * i);
        u.push_back(1.0 + i);
    }
    CHECK_THROWS_AS(fit_blowup_time(t, u, 50, 5), std::runtime_error);
    for (int i = 30; i < 80; ++i) {
        t.push_back(0.01 * i);
        u.push_back(80.0 - i);  // decreasing tail: non-monotone window
    }
    CHECK_THROWS_AS(fit_blowup_time(t, u, 50, 5), std::runtime_error);
}

TEST_CASE("free linear wave conserves the flat energy") {
    const RadialGrid g = RadialGrid::make(12.0, 1536);  // h = 1/128
    StatePair init = StatePair::zero(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        const double r = g.r[j];
        init.u[j] = 0.3 * std::exp(-4.0 * (r - 2.0) * (r - 2.0));
    }
    SolverConfig cfg;
    cfg.nonlinearity = false;
    cfg.t_final = 5.0;  // support stays inside the domain over this span
    const double e0 = energy(init, g, 5, false);
    StatePair end;
    double t_end = 0;
    TrajectoryRecorder rec;
    rec.stride = 5.0;
    rec.sink = [&](double t, const StatePair& s) {
        end = s;
        t_end = t;
    };
    const BlowupReport rep = solve(cfg, g, init, nullptr, nullptr, nullptr, {}, &rec);
    CHECK_FALSE(rep.blew_up);
    REQUIRE(t_end > 4.9);
    const double e1 = energy(end, g, 5, false);
    CHECK(std::abs(e1 / e0 - 1.0) < 1e-3);  // measured 5e-5 at this resolution
}

TEST_CASE("deterministic self-similar data blows up at the right time") {
    const RadialGrid g = RadialGrid::make(8.0, 1024);  // h = 1/128
    ProfileParams p;
    p.d = 3;
    p.T = 1.0;
    const StatePair init = u_T_state(0.0, g, p);
    SolverConfig cfg;
    const BlowupReport rep = solve(cfg, g, init);
    CHECK(rep.blew_up);
    CHECK(rep.trigger == "amplitude");
    CHECK(rep.fit_ok);
    CHECK(std::abs(rep.T_hat - 1.0) < 0.02);
    CHECK(rep.t_exit < 1.0);
    CHECK(rep.sup_amp >= cfg.amp_threshold);
    // central trajectory recorded from t = 0
    REQUIRE(rep.central_t.size() > 100);
    CHECK(rep.central_t.front() == 0.0);
    CHECK(rep.central_u.front() == doctest::Approx(init.u[0]).epsilon(1e-14));
}

TEST_CASE("small data stays global over the horizon") {
    const RadialGrid g = RadialGrid::make(8.0, 512);
    StatePair init = StatePair::zero(g.n_points);
    for (int j = 0; j < g.n_points; ++j)
        init.u[j] = 0.05 * std::exp(-g.r[j] * g.r[j]);
    SolverConfig cfg;
    const BlowupReport rep = solve(cfg, g, init);
    CHECK_FALSE(rep.blew_up);
    CHECK(rep.t_exit == cfg.t_final);
    CHECK(rep.trigger.empty());
}

TEST_CASE("dpd with a zero forcing path reproduces the direct scheme") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    const ModalBasis basis = ModalBasis::build(g, 5);
    const NoiseModel m0 = NoiseModel::make(basis, 0.0, 11.0, 8);
    SolverConfig cfg;
    cfg.t_final = 0.5;
    const double dt = cfg.dt(g);
    const NoisePath noise = NoisePath::sample(m0, dt, cfg.t_final, 1);
    const ZPath zp = convolution_from_increments(m0, noise);
    StatePair a = StatePair::zero(g.n_points);
    for (int j = 0; j < g.n_points; ++j) a.u[j] = 0.2 * std::exp(-g.r[j] * g.r[j]);
    StatePair b = a;
    SolverConfig direct = cfg;
    SolverConfig dpd = cfg;
    dpd.mode = SolveMode::dpd;
    for (int i = 0; i < 16; ++i) {
        solver_step(a, i * dt, dt, g, direct, nullptr, nullptr, i, nullptr);
        solver_step(b, i * dt, dt, g, dpd, &basis, &noise, i, &zp);
    }
    CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.u_hat - b.u_hat).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("solver validation rejects inconsistent setups") {
    const RadialGrid g = RadialGrid::make(8.0, 256);
    SolverConfig cfg;
    StatePair init = StatePair::zero(128);  // wrong size
    CHECK_THROWS_AS(solve(cfg, g, init), std::invalid_argument);
    StatePair ok = StatePair::zero(g.n_points);
    SolverConfig bad = cfg;
    bad.dt_factor = 1.5;
    CHECK_THROWS_AS(solve(bad, g, ok), std::invalid_argument);
    SolverConfig dpd = cfg;
    dpd.mode = SolveMode::dpd;  // needs a z path
    CHECK_THROWS_AS(solve(dpd, g, ok), std::invalid_argument);
}

TEST_CASE("picard mild solve matches the leapfrog dpd scheme for small data") {
    const RadialGrid g = RadialGrid::make(8.0, 512);
    const ModalBasis basis = ModalBasis::build(g, 5);
    StatePair init = StatePair::zero(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        const double r = g.r[j];
        init.u[j] = 0.1 * std::exp(-r * r);
        init.u_hat[j] = 0.05 * std::exp(-0.5 * r * r);
    }
    const NoiseModel m = NoiseModel::make(basis, 0.01, 11.0, 32);
    SolverConfig cfg;
    cfg.mode = SolveMode::dpd;
    cfg.t_final = 0.1;
    cfg.dt_factor = (0.1 / 16.0) / g.h;  // 16 steps land exactly on t = 0.1
    const double dt = cfg.dt(g);
    const NoisePath noise = NoisePath::sample(m, dt, cfg.t_final, 4242);
    const ZPath zp = convolution_from_increments(m, noise);
    NonlinearityContext ctx;
    const PicardResult pr = picard_mild_solve(init, &zp, 0.1, 20, basis, ctx);
    CHECK(pr.converged);
    CHECK(pr.contraction.back() < 1e-6);
    StatePair end;
    TrajectoryRecorder rec;
    rec.stride = 0.1;
    rec.sink = [&](double, const StatePair& s) { end = s; };
    solve(cfg, g, init, &basis, &noise, &zp, SobolevOrder{}, &rec);
    REQUIRE(end.size() == g.n_points);
    CHECK((pr.end_state.u - end.u).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((pr.end_state.u_hat - end.u_hat).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("profile discrepancy is small on exact self-similar data") {
    const RadialGrid g = RadialGrid::make(8.0, 1024);
    const RadialGrid xg = RadialGrid::make(10.0, 256);
    const ModalBasis xb = ModalBasis::build(xg, 5);
    ProfileParams p;
    p.d = 3;
    p.T = 1.0;
    const StatePair mid = u_T_state(0.5, g, p);
    const Discrepancy disc = psi_discrepancy(mid, g, 0.5, 1.0, 3, xb, SobolevOrder{});
    CHECK(disc.sup < 0.05);
    CHECK(disc.sup >= 0.0);
    // wrong blowup time leaves an order-one mismatch
    const Discrepancy off = psi_discrepancy(mid, g, 0.5, 1.4, 3, xb, SobolevOrder{});
    CHECK(off.sup > 5 * disc.sup);
}
