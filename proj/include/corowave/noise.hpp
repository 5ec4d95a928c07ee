#pragma once

#include <cstdint>
#include <string>

#include "corowave/modal.hpp"

namespace corowave {

// splitmix64; the basis of all seeding so parallel schedules cannot change draws
uint64_t splitmix64(uint64_t& state);
uint64_t hash_seed(uint64_t run_seed, uint64_t index);

// Deterministic, portable Gaussian stream (splitmix64 + Box-Muller).
class Rng {
  public:
    explicit Rng(uint64_t seed) : s_(seed) {}
    uint64_t next_u64() { return splitmix64(s_); }
    double uniform();  // in (0, 1)
    double normal();

  private:
    uint64_t s_;
    bool have_spare_ = false;
    double spare_ = 0;
};

/// sigma_k = c (1 + lambda_k)^{-beta/2} for k < modes, 0 beyond: trace-class,
// non-degenerate on the resolved subspace.
struct NoiseModel {
    const ModalBasis* basis = nullptr;
    double c = 0.05;
    double beta = 11.0;
    int modes = 64;
    VectorXd sigma;

    static NoiseModel make(const ModalBasis& basis, double c, double beta, int modes);
    // finite surrogate of the trace bound sum sigma_k^2 (1+lambda_k)^{k_s}
    double trace_bound(double exponent) const;
};

// Per-step modal Brownian increments, Var = dt sigma_k^2. Regenerable from seed.
struct NoisePath {
    double dt = 0;
    int steps = 0;
    int modes = 0;
    uint64_t seed = 0;
    MatrixXd incr;  // steps x modes

    static NoisePath sample(const NoiseModel& model, double dt, double t_final,
                            uint64_t seed);
};

/// binary dump, magic "CBLZ1": u32 steps, u32 modes, f64 dt, u64 seed,
// then modes*steps little-endian doubles, mode-major
void write_noise_dump(const NoisePath& path, const std::string& file);
NoisePath read_noise_dump(const std::string& file);

// Exact Gaussian transition of the modal stochastic convolution
//   dz_k = zhat_k dt, dzhat_k = -lambda_k z_k dt + sigma_k dB_k
// over one step: rotation propagator plus the exact innovation covariance
//   q_zz = sigma^2 dt^3 g3(w dt)/4, q_vv = sigma^2(dt - w^2 dt^3 g3(w dt)/4),
//   q_zv = sigma^2 dt^2 sinc^2(w dt)/2,
// sampled velocity-first so the velocity draw can be shared with schemes that
// apply plain sqrt(dt) kicks.
struct ZPath {
    double dt = 0;
    int steps = 0;
    uint64_t seed = 0;
    MatrixXd z;     // (steps+1) x modes, modal coefficients
    MatrixXd zhat;  // (steps+1) x modes
};

ZPath sample_convolution(const NoiseModel& model, double dt, double t_final,
                         uint64_t seed);

// Same transition kernel, but the velocity innovation is read off a stored
// increment table (incr = sigma sqrt(dt) n1), so a time stepper that applies
// those increments as plain kicks and this convolution see the same Brownian
// path. The second (conditionally independent) component is drawn from a
// stream derived from the path seed.
ZPath convolution_from_increments(const NoiseModel& model, const NoisePath& path);

struct ModeVariance {
    double var_z = 0;
    double var_zhat = 0;
    double cov = 0;
};
// exact Ito integrals at time t
ModeVariance mode_variance(const NoiseModel& model, int k, double t);

// modal coefficients of (z, zhat) at arbitrary t (linear interpolation in t)
void zpath_coeffs_at(const ZPath& path, double t, VectorXd& z, VectorXd& zhat);
// physical-space values on the basis grid
StatePair evaluate_z(const ZPath& path, const ModalBasis& basis, double t);
// point value at radius r (cubic radial interpolation)
void evaluate_z_at(const ZPath& path, const ModalBasis& basis, double t, double r,
                   double& z, double& zhat);

}  // namespace corowave
