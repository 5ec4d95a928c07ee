#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "corowave/fitting.hpp"
#include "corowave/noise.hpp"
#include "corowave/physics.hpp"

namespace corowave {

enum class SolveMode { direct, dpd };

struct SolverConfig {
    int n = 5;
    double dt_factor = 0.45;  // dt = dt_factor * h; must satisfy dt <= h
    SolveMode mode = SolveMode::direct;
    double amp_threshold = 200.0;   // sup |u| blowup trigger
    double norm_threshold = 1e8;    // Sobolev k-norm surrogate trigger
    double t_final = 2.0;
    int fit_window = 50;
    int fit_skip = 5;
    double taylor_threshold = 0.25;
    bool nonlinearity = true;
    int norm_check_stride = 16;     // steps between norm-trigger checks
    // amplitude fractions at which profile-discrepancy measurements happen
    std::vector<double> measure_levels = {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0};

    void validate(const RadialGrid& grid) const;
    double dt(const RadialGrid& grid) const { return dt_factor * grid.h; }
};

struct BlowupReport {
    bool blew_up = false;
    double t_exit = 0;
    double T_hat = 0;
    bool fit_ok = false;
    bool fit_monotone = false;
    double fit_drift = 0;
    std::string trigger;  // "amplitude", "norm", "divergence", ""
    double sup_amp = 0;
    double exit_norm_s = 0;
    double exit_norm_k = 0;
    double exit_energy = 0;
    double profile_err_final = 0;
    std::vector<double> central_t;
    std::vector<double> central_u;
    // profile-discrepancy history at the configured measurement levels
    std::vector<double> disc_t;
    std::vector<double> disc_sup;
    std::vector<double> disc_sobolev;
};

struct TrajectoryRecorder {
    double stride = 0;  // <= 0 disables
    std::function<void(double t, const StatePair&)> sink;
};

// One leapfrog step (kick-drift-kick), advancing exactly dt. Direct mode adds
// the Gaussian velocity increment in the first kick; dpd mode evaluates the
// nonlinearity at w + z(t) with z from the exact modal path.
void solver_step(StatePair& state, double t, double dt, const RadialGrid& grid,
                 const SolverConfig& cfg, const ModalBasis* basis,
                 const NoisePath* noise, int noise_step, const ZPath* zpath);

// Integrate until a blowup trigger or t_final. The basis is optional; without
// it norm triggers and exit norms are skipped.
BlowupReport solve(const SolverConfig& cfg, const RadialGrid& grid,
                   const StatePair& initial, const ModalBasis* basis,
                   const NoisePath* noise, const ZPath* zpath,
                   const SobolevOrder& order = {},
                   const TrajectoryRecorder* rec = nullptr);

// sup_xi |(T_hat - t) u(t, (T_hat - t) xi) - Phi(xi)| over xi in [0, xi_max],
// plus a Sobolev surrogate of the tapered discrepancy on the xi basis.
struct Discrepancy {
    double sup = 0;
    double sobolev = 0;
};
Discrepancy psi_discrepancy(const StatePair& state, const RadialGrid& grid,
                            double t, double T_hat, int d,
                            const ModalBasis& xi_basis, const SobolevOrder& order);

// T_hat from a recorded central-value trajectory plus drift diagnostics
BlowupFit estimate_T_tilde(const std::vector<double>& times,
                           const std::vector<double>& central,
                           int window = 50, int skip = 5);

// Picard iteration for the mild form
//   w(t) = cos(sqrt(L) t) u0 + sin(sqrt(L) t)/sqrt(L) u0_hat
//          + int_0^t sin(sqrt(L)(t-s))/sqrt(L) n0(w+z)(s) ds
// on a uniform quadrature lattice (trapezoid). Returns the end state and the
// contraction factors of successive sup-norm differences.
struct PicardResult {
    StatePair end_state;
    std::vector<double> contraction;
    int iterations = 0;
    bool converged = false;
};
PicardResult picard_mild_solve(const StatePair& initial, const ZPath* zpath,
                               double t_span, int iterations,
                               const ModalBasis& basis,
                               const NonlinearityContext& ctx,
                               int quad_points = 64, double tol = 1e-12);

}  // namespace corowave
