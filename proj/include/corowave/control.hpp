#pragma once

#include <vector>

#include "corowave/solver.hpp"

namespace corowave {

struct SteeringProblem {
    StatePair u0;
    StatePair u1;
    double T1 = 1.0;

    void validate(int grid_points) const;
};

// Modal trajectory sampled on a uniform time lattice over [0, T1].
struct SteeringTrajectory {
    double dt = 0;
    std::vector<double> t;
    std::vector<VectorXd> u;      // modal coefficients of u(t)
    std::vector<VectorXd> u_hat;  // modal coefficients of du/dt
};

// Cubic-Hermite-in-time interpolant with resolvent/semigroup corrections so
// that all four endpoint identities u(0)=u0, u'(0)=u0_hat, u(T1)=u1,
// u'(T1)=u1_hat hold exactly mode by mode.
SteeringTrajectory steering_state(const SteeringProblem& problem,
                                  const ModalBasis& basis, int steps);

// f(t) = u_hat(t) - u_hat(0) - int_0^t (Laplacian u + n0(u)) ds, trapezoid;
// modal coefficients on the trajectory lattice. f(0) = 0 exactly.
std::vector<VectorXd> forcing_from_state(const SteeringTrajectory& traj,
                                         const ModalBasis& basis,
                                         const NonlinearityContext& ctx);

// Exact modal solution of z'' = Laplacian z + d_t f with z(0)=z'(0)=0 for
// piecewise-linear f; sampled on an arbitrary uniform lattice of nt steps.
ZPath z_from_forcing(const std::vector<VectorXd>& f, double f_dt,
                     const ModalBasis& basis, double dt_out, double t_end);

struct ContinuityRow {
    std::string which;  // "u0" or "z"
    double size = 0;
    double endpoint_shift = 0;
};

struct SteeringReport {
    double endpoint_sup = 0;
    double endpoint_sobolev = 0;
    bool solver_diverged = false;
    std::vector<ContinuityRow> continuity;
};

// Re-solve the translated deterministic equation for w from (u0, u0_hat) with
// the synthesized z (dpd leapfrog) and report ||w(T1)+z(T1) - u1|| plus the
// endpoint response to perturbations of u0 and z at the probe sizes.
SteeringReport verify_steering(const SteeringProblem& problem,
                               const RadialGrid& grid, const ModalBasis& basis,
                               const SolverConfig& solver_cfg,
                               const SobolevOrder& order,
                               bool with_continuity = true,
                               int trajectory_steps = 256,
                               const std::vector<double>& continuity_sizes =
                                   {1e-2, 1e-3, 1e-4});

}  // namespace corowave
