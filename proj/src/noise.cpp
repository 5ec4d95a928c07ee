#include "corowave/noise.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "corowave/interp.hpp"
#include "corowave/physics.hpp"

namespace corowave {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t hash_seed(uint64_t run_seed, uint64_t index) {
    uint64_t s = run_seed;
    const uint64_t a = splitmix64(s);
    s = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    return splitmix64(s);
}

double Rng::uniform() {
    // 53-bit mantissa in (0, 1]; shifted away from 0 for the log below
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double m = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = m * std::sin(a);
    have_spare_ = true;
    return m * std::cos(a);
}

NoiseModel NoiseModel::make(const ModalBasis& basis, double c, double beta, int modes) {
    if (c < 0) throw std::invalid_argument("NoiseModel: amplitude c must be >= 0");
    if (beta <= 0) throw std::invalid_argument("NoiseModel: decay beta must be > 0");
    if (modes < 1 || modes > basis.size())
        throw std::invalid_argument("NoiseModel: modes out of range");
    NoiseModel m;
    m.basis = &basis;
    m.c = c;
    m.beta = beta;
    m.modes = modes;
    m.sigma.resize(modes);
    for (int k = 0; k < modes; ++k)
        m.sigma[k] = c * std::pow(1.0 + basis.lambda(k), -beta / 2.0);
    return m;
}

double NoiseModel::trace_bound(double exponent) const {
    double s = 0;
    for (int k = 0; k < modes; ++k)
        s += sigma[k] * sigma[k] * std::pow(1.0 + basis->lambda(k), exponent);
    return s;
}

NoisePath NoisePath::sample(const NoiseModel& model, double dt, double t_final,
                            uint64_t seed) {
    NoisePath p;
    p.dt = dt;
    p.steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
    p.modes = model.modes;
    p.seed = seed;
    p.incr.resize(p.steps, p.modes);
    Rng rng(seed);
    const double sq = std::sqrt(dt);
    for (int i = 0; i < p.steps; ++i)
        for (int k = 0; k < p.modes; ++k)
            p.incr(i, k) = sq * model.sigma[k] * rng.normal();
    return p;
}

void write_noise_dump(const NoisePath& path, const std::string& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("write_noise_dump: cannot open " + file);
    os.write("CBLZ1", 5);
    const uint32_t steps = path.steps, modes = path.modes;
    os.write(reinterpret_cast<const char*>(&steps), 4);
    os.write(reinterpret_cast<const char*>(&modes), 4);
    os.write(reinterpret_cast<const char*>(&path.dt), 8);
    os.write(reinterpret_cast<const char*>(&path.seed), 8);
    for (int k = 0; k < path.modes; ++k)
        for (int i = 0; i < path.steps; ++i) {
            const double v = path.incr(i, k);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
    if (!os) throw std::runtime_error("write_noise_dump: write failed: " + file);
}

NoisePath read_noise_dump(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("read_noise_dump: cannot open " + file);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, "CBLZ1", 5) != 0)
        throw std::runtime_error("read_noise_dump: bad magic in " + file);
    uint32_t steps = 0, modes = 0;
    NoisePath p;
    is.read(reinterpret_cast<char*>(&steps), 4);
    is.read(reinterpret_cast<char*>(&modes), 4);
    is.read(reinterpret_cast<char*>(&p.dt), 8);
    is.read(reinterpret_cast<char*>(&p.seed), 8);
    p.steps = steps;
    p.modes = modes;
    p.incr.resize(p.steps, p.modes);
    for (int k = 0; k < p.modes; ++k)
        for (int i = 0; i < p.steps; ++i) {
            double v;
            is.read(reinterpret_cast<char*>(&v), 8);
            p.incr(i, k) = v;
        }
    if (!is) throw std::runtime_error("read_noise_dump: truncated file " + file);
    return p;
}

ZPath sample_convolution(const NoiseModel& model, double dt, double t_final,
                         uint64_t seed) {
    ZPath p;
    p.dt = dt;
    p.steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
    p.seed = seed;
    const int M = model.modes;
    p.z.setZero(p.steps + 1, M);
    p.zhat.setZero(p.steps + 1, M);

    // per-mode exact step: rotation by theta = w dt plus the exact innovation
    VectorXd cth(M), dsnc(M), wsin(M), l11(M), l21(M), l22(M);
    for (int k = 0; k < M; ++k) {
        const double w = std::sqrt(model.basis->lambda(k));
        const double th = w * dt;
        cth[k] = std::cos(th);
        dsnc[k] = dt * sinc_fn(th);
        wsin[k] = (th == 0.0) ? 0.0 : w * std::sin(th);
        const double s2 = model.sigma[k] * model.sigma[k];
        const double qzz = s2 * dt * dt * dt * gamma_over_y3(th) / 4.0;
        const double qvv = s2 * (dt - w * w * dt * dt * dt * gamma_over_y3(th) / 4.0);
        const double snc = sinc_fn(th);
        const double qzv = s2 * dt * dt * snc * snc / 2.0;
        // velocity-first Cholesky: zhat-draw first, then z conditioned on it
        l11[k] = std::sqrt(qvv);
        l21[k] = qzv / l11[k];
        const double rem = qzz - qzv * qzv / qvv;
        l22[k] = std::sqrt(std::max(rem, 0.0));
    }

    Rng rng(seed);
    for (int i = 0; i < p.steps; ++i) {
        for (int k = 0; k < M; ++k) {
            const double z0 = p.z(i, k), v0 = p.zhat(i, k);
            const double n1 = rng.normal();
            const double n2 = rng.normal();
            p.z(i + 1, k) = cth[k] * z0 + dsnc[k] * v0 + l21[k] * n1 + l22[k] * n2;
            p.zhat(i + 1, k) = -wsin[k] * z0 + cth[k] * v0 + l11[k] * n1;
        }
    }
    return p;
}

ZPath convolution_from_increments(const NoiseModel& model, const NoisePath& noise) {
    ZPath p;
    p.dt = noise.dt;
    p.steps = noise.steps;
    p.seed = noise.seed;
    const int M = std::min(model.modes, noise.modes);
    const double dt = noise.dt;
    p.z.setZero(p.steps + 1, M);
    p.zhat.setZero(p.steps + 1, M);
    VectorXd cth(M), dsnc(M), wsin(M), l11(M), l21(M), l22(M);
    for (int k = 0; k < M; ++k) {
        const double w = std::sqrt(model.basis->lambda(k));
        const double th = w * dt;
        cth[k] = std::cos(th);
        dsnc[k] = dt * sinc_fn(th);
        wsin[k] = (th == 0.0) ? 0.0 : w * std::sin(th);
        const double s2 = model.sigma[k] * model.sigma[k];
        const double qzz = s2 * dt * dt * dt * gamma_over_y3(th) / 4.0;
        const double qvv = s2 * (dt - w * w * dt * dt * dt * gamma_over_y3(th) / 4.0);
        const double snc = sinc_fn(th);
        const double qzv = s2 * dt * dt * snc * snc / 2.0;
        if (qvv > 0.0) {
            l11[k] = std::sqrt(qvv);
            l21[k] = qzv / l11[k];
            l22[k] = std::sqrt(std::max(qzz - qzv * qzv / qvv, 0.0));
        } else {
            l11[k] = l21[k] = l22[k] = 0.0;  // silent mode: exactly zero path
        }
    }
    // velocity draws shared with the plain sqrt(dt)-kick increments; the
    // z-component's independent remainder comes from a derived stream
    Rng extra(hash_seed(noise.seed, 0x5a5a5a5aULL));
    for (int i = 0; i < p.steps; ++i) {
        for (int k = 0; k < M; ++k) {
            const double sd = model.sigma[k] * std::sqrt(dt);
            const double n1 = (sd > 0) ? noise.incr(i, k) / sd : 0.0;
            const double n2 = extra.normal();
            const double z0 = p.z(i, k), v0 = p.zhat(i, k);
            p.z(i + 1, k) = cth[k] * z0 + dsnc[k] * v0 + l21[k] * n1 + l22[k] * n2;
            p.zhat(i + 1, k) = -wsin[k] * z0 + cth[k] * v0 + l11[k] * n1;
        }
    }
    return p;
}

ModeVariance mode_variance(const NoiseModel& model, int k, double t) {
    const double w = std::sqrt(model.basis->lambda(k));
    const double s2 = model.sigma[k] * model.sigma[k];
    const double th = w * t;
    ModeVariance v;
    v.var_z = s2 * t * t * t * gamma_over_y3(th) / 4.0;
    v.var_zhat = s2 * (t - w * w * t * t * t * gamma_over_y3(th) / 4.0);
    const double snc = sinc_fn(th);
    v.cov = s2 * t * t * snc * snc / 2.0;
    return v;
}

void zpath_coeffs_at(const ZPath& path, double t, VectorXd& z, VectorXd& zhat) {
    const double x = t / path.dt;
    int i = static_cast<int>(std::floor(x));
    i = std::max(0, std::min(i, path.steps - 1));
    const double a = x - i;
    z = (1.0 - a) * path.z.row(i).transpose() + a * path.z.row(i + 1).transpose();
    zhat = (1.0 - a) * path.zhat.row(i).transpose() + a * path.zhat.row(i + 1).transpose();
}

StatePair evaluate_z(const ZPath& path, const ModalBasis& basis, double t) {
    VectorXd zc, vc;
    zpath_coeffs_at(path, t, zc, vc);
    VectorXd zfull = VectorXd::Zero(basis.size());
    VectorXd vfull = VectorXd::Zero(basis.size());
    zfull.head(zc.size()) = zc;
    vfull.head(vc.size()) = vc;
    return {basis.synth(zfull), basis.synth(vfull)};
}

void evaluate_z_at(const ZPath& path, const ModalBasis& basis, double t, double r,
                   double& z, double& zhat) {
    const StatePair s = evaluate_z(path, basis, t);
    z = interp_even(s.u, basis.grid().h, r);
    zhat = interp_even(s.u_hat, basis.grid().h, r);
}

}  // namespace corowave
