#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corowave/noise.hpp"
#include "corowave/similarity.hpp"

namespace corowave {

// Discrete linearized generator with its rank-one spectral data near
// eigenvalue 1. gauge is the right eigenvector, cogauge the left eigenvector
// in the pair-weighted inner product, normalized so <gauge, cogauge>_w = 1.
struct LinearizedOperator {
    RadialGrid xi_grid;
    int n = 5;
    MatrixXd L;
    StatePair gauge;
    StatePair cogauge;
    VectorXd w;  // cell weights of the xi grid

    double pairing(const StatePair& f) const { return pair_wdot(f, cogauge, w); }
    StatePair project(const StatePair& f) const;        // P f
    StatePair project_out(const StatePair& f) const;    // (I-P) f
    double gauge_residual() const;                      // ||L g - g||/||g|| interior
    double projector_defect() const;                    // ||P^2 - P|| action bound
};

LinearizedOperator build_linearized_operator(const RadialGrid& xi_grid, int n);

struct LPConfig {
    double delta = 0.2;     // ball radius
    double big_C = 10.0;    // data-smallness divisor
    double N_div = 2.0;     // bracket divisor: T_tilde in [T - delta/N, T + delta/N]
    double omega_bar = 0.05;
    double tau_max = 60.0;
    double picard_tol = 1e-8;
    int picard_max_iter = 25;
    double coeff_tol = 1e-8;    // root tolerance on the corrector coefficient
    double quad_stride = 0.05;  // tau spacing of stored integrand frames
    double cfl = 0.8;

    // pipeline-level invariants: 0 < omega_bar < s+1-n/2, tau_max >= 20 with
    // omega_bar*tau_max >= 3,
    // delta/N <= T/2
    void validate(const SobolevOrder& order, int n, double T) const;
};

// Initial perturbation Psi_0 = (T~ u0(T~ .) - Phi, T~^2 u0_hat(T~ .) - Phi_hat)
// on the xi grid. Throws std::domain_error for T_tilde outside (0, 2T].
StatePair initial_perturbation(const StatePair& u0, const RadialGrid& phys_grid,
                               double T_tilde, double T, const RadialGrid& xi_grid,
                               int d);

// Frames of a trajectory on a uniform tau lattice (stride = quad_stride).
struct FrameSeries {
    double stride = 0;
    std::vector<StatePair> frames;

    int count() const { return static_cast<int>(frames.size()); }
    double horizon() const { return stride * (count() - 1); }
    StatePair at(double tau) const;  // linear interpolation
};

// Similarity-frame noise Z(tau) = (T~ - t) z(t, xi (T~ - t)) evaluated from the
// modal convolution path; empty optional means Z = 0.
FrameSeries z_similarity_frames(const ZPath* zpath, const ModalBasis& phys_basis,
                                const SimilarityFrame& frame,
                                const RadialGrid& xi_grid, double tau_max,
                                double stride);

struct CorrectorResult {
    double coeff = 0;        // <C, cogauge>_w
    StatePair C;             // coeff * gauge
    double tail_bound = 0;   // e^{-tau_max} sup_s |<G(s), cogauge>|
};

// C = P(v + int_0^tau_max e^{-s} G(s) ds), G = N(Psi+Z) + V Z, trapezoid on
// the stored frames. psi must cover [0, tau_max].
CorrectorResult corrector(const StatePair& v, const FrameSeries& psi,
                          const FrameSeries& z, const LinearizedOperator& op,
                          const NonlinearityContext& ctx, double tau_max);

struct FixedPointResult {
    FrameSeries psi;
    std::vector<double> contraction;
    double weighted_norm = 0;   // sup_tau e^{omega_bar tau} ||Psi(tau)||_w
    double defect = 0;          // weighted norm of Psi - K(Psi) at the last sweep
    double corrector_coeff = 0; // <C, cogauge> at the fixed point
    double tail_bound = 0;
    int iterations = 0;
    bool converged = false;
};

// Picard iteration on K(Psi)(tau) = S(tau)(v - C) + int_0^tau S(tau-s) G(s) ds,
// realized as one forced linearized evolve per sweep: the gauge coefficient is
// integrated backward exactly and the gauge-orthogonal part stepped forward.
// Throws std::runtime_error on smallness violation or non-contraction.
FixedPointResult lp_fixed_point(const StatePair& v, const FrameSeries& z,
                                const LinearizedOperator& op, const LPConfig& cfg,
                                const NonlinearityContext& ctx);

struct TTildeResult {
    double T_tilde = 0;
    bool bracket_found = false;
    std::vector<double> scan_T;      // bracket scan abscissae
    std::vector<double> scan_coeff;  // corrector coefficients at the scan points
    std::vector<double> contraction; // contraction factors of the final solve
    double tail_bound = 0;
    double final_coeff = 0;
    int evaluations = 0;
    FixedPointResult final_fp;
    std::string diagnostics_json() const;
};

// Root of the corrector coefficient over T~ in [T - delta/N, T + delta/N]:
// 9-point sign scan (concurrent) then bisection. Throws std::runtime_error
// labeled "bracket-failure" when no sign change exists.
TTildeResult find_T_tilde(const StatePair& u0, const RadialGrid& phys_grid,
                          const ZPath* zpath, const ModalBasis* phys_basis,
                          double T, const LinearizedOperator& op,
                          const LPConfig& cfg, const NonlinearityContext& ctx);

// Physical-space reconstruction u(t) = [Phi + Psi + Z](tau(t), r/(T~-t))/(T~-t)
// for cross-validation against the direct solver.
StatePair reconstruct_physical(const FrameSeries& psi, const FrameSeries& z,
                               const LinearizedOperator& op,
                               const SimilarityFrame& frame, double t,
                               const RadialGrid& phys_grid);

}  // namespace corowave
