#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <set>

#include "corowave/noise.hpp"

using namespace corowave;

namespace {

struct Fixture {
    RadialGrid grid = RadialGrid::make(8.0, 256);
    ModalBasis basis = ModalBasis::build(grid, 5);
};

Fixture& fx() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("seed hashing is deterministic and collision-free over paths") {
    CHECK(hash_seed(12345, 0) == hash_seed(12345, 0));
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 4096; ++i) seen.insert(hash_seed(12345, i));
    CHECK(seen.size() == 4096);
    CHECK(hash_seed(1, 7) != hash_seed(2, 7));
}

TEST_CASE("gaussian stream moments") {
    Rng rng(20260817);
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(double(n)));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
    Rng u(99);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("covariance law sigma_k and mode cutoff") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 16);
    REQUIRE(m.sigma.size() == fx().basis.size());
    for (int k = 0; k < 16; ++k)
        CHECK(m.sigma[k] ==
              doctest::Approx(0.05 * std::pow(1.0 + fx().basis.lambda(k), -5.5))
                  .epsilon(1e-14));
    for (int k = 16; k < m.sigma.size(); ++k) CHECK(m.sigma[k] == 0.0);
    CHECK(m.trace_bound(6.0) > 0.0);
    // beta = 11 dominates exponent 6: adding modes barely moves the sum
    const NoiseModel wide = NoiseModel::make(fx().basis, 0.05, 11.0, 64);
    CHECK(wide.trace_bound(6.0) ==
          doctest::Approx(m.trace_bound(6.0)).epsilon(1e-2));
}

TEST_CASE("increment table variance and reproducibility") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 8);
    const double dt = 1.0 / 64.0;
    const NoisePath a = NoisePath::sample(m, dt, 64.0, 31415);
    const NoisePath b = NoisePath::sample(m, dt, 64.0, 31415);
    CHECK(a.steps == 4096);
    CHECK((a.incr - b.incr).cwiseAbs().maxCoeff() == 0.0);
    const NoisePath c = NoisePath::sample(m, dt, 64.0, 31416);
    CHECK((a.incr - c.incr).cwiseAbs().maxCoeff() > 0.0);
    for (int k : {0, 3, 7}) {
        const double var = a.incr.col(k).squaredNorm() / a.steps;
        const double exact = dt * m.sigma[k] * m.sigma[k];
        CHECK(var == doctest::Approx(exact).epsilon(0.1));
    }
}

TEST_CASE("noise dump round-trips bit-exactly") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.02, 11.0, 6);
    const NoisePath p = NoisePath::sample(m, 0.01, 0.25, 777);
    const std::string file = "unit_noise_dump.bin";
    write_noise_dump(p, file);
    const NoisePath q = read_noise_dump(file);
    CHECK(q.dt == p.dt);
    CHECK(q.steps == p.steps);
    CHECK(q.modes == p.modes);
    CHECK(q.seed == p.seed);
    CHECK((q.incr - p.incr).cwiseAbs().maxCoeff() == 0.0);
    // magic header guards against foreign files
    FILE* f = std::fopen(file.c_str(), "rb+");
    REQUIRE(f != nullptr);
    std::fputs("XXXXX", f);
    std::fclose(f);
    CHECK_THROWS(read_noise_dump(file));
    std::remove(file.c_str());
}

TEST_CASE("mode variance closed forms") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 8);
    for (int k : {0, 2, 5}) {
        const double w = std::sqrt(fx().basis.lambda(k));
        const double s2 = m.sigma[k] * m.sigma[k];
        for (double t : {0.25, 1.0, 3.0}) {
            // independent Ito integrals of sin/cos kernels
            const double vz = s2 / (w * w) * (t / 2 - std::sin(2 * w * t) / (4 * w));
            const double vh = s2 * (t / 2 + std::sin(2 * w * t) / (4 * w));
            const double cv = s2 * std::sin(w * t) * std::sin(w * t) / (2 * w * w);
            const ModeVariance mv = mode_variance(m, k, t);
            CHECK(mv.var_z == doctest::Approx(vz).epsilon(1e-12));
            CHECK(mv.var_zhat == doctest::Approx(vh).epsilon(1e-12));
            CHECK(mv.cov == doctest::Approx(cv).epsilon(1e-12));
        }
    }
}

TEST_CASE("sampled convolution matches the exact law statistically") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 4);
    const int S = 4000;
    const double t = 1.0, dt = 0.125;
    double sz = 0, szz = 0, sh = 0, shh = 0;
    for (int i = 0; i < S; ++i) {
        const ZPath p = sample_convolution(m, dt, t, hash_seed(5150, i));
        const double z = p.z(p.steps, 0), zh = p.zhat(p.steps, 0);
        sz += z;
        szz += z * z;
        sh += zh;
        shh += zh * zh;
    }
    const ModeVariance mv = mode_variance(m, 0, t);
    const double vz = szz / S - (sz / S) * (sz / S);
    const double vh = shh / S - (sh / S) * (sh / S);
    const double se_z = mv.var_z * std::sqrt(2.0 / (S - 1));
    const double se_h = mv.var_zhat * std::sqrt(2.0 / (S - 1));
    CHECK(std::abs(vz - mv.var_z) < 4 * se_z);
    CHECK(std::abs(vh - mv.var_zhat) < 4 * se_h);
    CHECK(std::abs(sz / S) < 4 * std::sqrt(mv.var_z / S));
}

TEST_CASE("convolution built from stored increments shares the Brownian path") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 8);
    const double dt = 1.0 / 32.0;
    const NoisePath noise = NoisePath::sample(m, dt, 2.0, 8080);
    const ZPath a = convolution_from_increments(m, noise);
    const ZPath b = convolution_from_increments(m, noise);
    CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.steps == noise.steps);
    CHECK(a.z.rows() == noise.steps + 1);
    // starts from rest
    CHECK(a.z.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.zhat.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.z.allFinite());
}

TEST_CASE("zero-amplitude model yields the zero convolution path") {
    const NoiseModel m0 = NoiseModel::make(fx().basis, 0.0, 11.0, 8);
    const NoisePath noise = NoisePath::sample(m0, 0.05, 1.0, 4321);
    CHECK(noise.incr.cwiseAbs().maxCoeff() == 0.0);
    const ZPath p = convolution_from_increments(m0, noise);
    REQUIRE(p.z.allFinite());
    REQUIRE(p.zhat.allFinite());
    CHECK(p.z.cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.zhat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zpath interpolation hits lattice values exactly") {
    const NoiseModel m = NoiseModel::make(fx().basis, 0.05, 11.0, 4);
    const ZPath p = sample_convolution(m, 0.125, 1.0, 99);
    VectorXd z, zh;
    zpath_coeffs_at(p, 0.5, z, zh);  // lattice node 4
    for (int k = 0; k < 4; ++k) {
        CHECK(z[k] == doctest::Approx(p.z(4, k)).epsilon(1e-14));
        CHECK(zh[k] == doctest::Approx(p.zhat(4, k)).epsilon(1e-14));
    }
    zpath_coeffs_at(p, 0.5625, z, zh);  // halfway: linear blend of rows 4, 5
    for (int k = 0; k < 4; ++k)
        CHECK(z[k] == doctest::Approx(0.5 * (p.z(4, k) + p.z(5, k))).epsilon(1e-12));
    // physical synthesis agrees with a manual mode sum
    const StatePair s = evaluate_z(p, fx().basis, 0.5);
    VectorXd manual = VectorXd::Zero(fx().grid.n_points);
    for (int k = 0; k < 4; ++k) manual += p.z(4, k) * fx().basis.mode(k);
    CHECK((s.u - manual).cwiseAbs().maxCoeff() < 1e-12);
    double zv, zhv;
    evaluate_z_at(p, fx().basis, 0.5, fx().grid.r[10], zv, zhv);
    CHECK(zv == doctest::Approx(s.u[10]).epsilon(1e-10));
}
