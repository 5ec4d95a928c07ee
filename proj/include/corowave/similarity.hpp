#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "corowave/physics.hpp"
#include "corowave/profiles.hpp"

namespace corowave {

// tau = log(T_tilde/(T_tilde - t)), xi = r/(T_tilde - t); blowup at T_tilde
// becomes tau -> infinity.
struct SimilarityFrame {
    double T_tilde = 1.0;

    double tau_of_t(double t) const;
    double t_of_tau(double tau) const;
    double scale(double tau) const;  // T_tilde - t = T_tilde e^{-tau}
};

// Rescale a physical pair into the similarity frame at time t:
//   U(xi) = (T_tilde - t) u(xi (T_tilde - t)),  U_hat = (T_tilde - t)^2 u_hat.
StatePair to_similarity(const StatePair& phys, const RadialGrid& phys_grid,
                        double t, double T_tilde, const RadialGrid& xi_grid);

// Inverse at similarity time tau onto a physical grid.
StatePair from_similarity(const StatePair& sim, const RadialGrid& xi_grid,
                          double tau, const SimilarityFrame& frame,
                          const RadialGrid& phys_grid);

enum class SimRhsMode { full, linearized, linearized_forced };

struct SimEvolveOptions {
    SimRhsMode mode = SimRhsMode::full;
    double cfl = 0.8;          // dtau = cfl * h / (xi_max + 1), RK4 in tau
    double frame_stride = 0;   // tau spacing of stored frames; <= 0: endpoints only
    // forcing source G(tau) added to the pair RHS in linearized_forced mode
    std::function<void(double tau, StatePair& G)> source;
    // subtract the gauge component after every step (and from the source)
    bool project_out_gauge = false;
    const StatePair* gauge = nullptr;    // required when project_out_gauge
    const StatePair* cogauge = nullptr;  // pair-weighted left eigenvector
};

struct SimTrajectory {
    std::vector<double> taus;
    std::vector<StatePair> frames;
    StatePair final;
    double dtau = 0;
};

// Pair RHS in similarity variables:
//   U'     = -U - xi dxi U + U_hat
//   U_hat' = Laplacian_open U - 2 U_hat - xi dxi U_hat + n0(U)   (full)
// linearized replaces n0 by multiplication with V(xi) around Phi.
void sim_rhs(const StatePair& s, const RadialGrid& xi_grid,
             const NonlinearityContext& ctx, SimRhsMode mode,
             const VectorXd& V, StatePair& out);

SimTrajectory evolve_similarity(const StatePair& initial, const RadialGrid& xi_grid,
                                int n, double tau_span, const SimEvolveOptions& opt);

// Dense 2N x 2N matrix of the linearized generator, built by applying the
// discrete RHS to unit vectors; block order (U, U_hat).
MatrixXd linearized_matrix(const RadialGrid& xi_grid, int n);

struct SpectrumResult {
    std::vector<std::complex<double>> eigenvalues;  // sorted by Re descending
    double gauge_eigenvalue_residual = 0;           // |lambda_near_1 - 1|
};
SpectrumResult spectrum(const RadialGrid& xi_grid, int n, int count);

}  // namespace corowave
