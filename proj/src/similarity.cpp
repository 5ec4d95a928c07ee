#include "corowave/similarity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "corowave/interp.hpp"

namespace corowave {

double SimilarityFrame::tau_of_t(double t) const {
    if (!(T_tilde > 0.0))
        throw std::domain_error("SimilarityFrame: T_tilde must be positive");
    if (!(t < T_tilde))
        throw std::domain_error("SimilarityFrame: t must lie below T_tilde");
    return std::log(T_tilde / (T_tilde - t));
}

double SimilarityFrame::t_of_tau(double tau) const {
    return T_tilde * (1.0 - std::exp(-tau));
}

double SimilarityFrame::scale(double tau) const {
    return T_tilde * std::exp(-tau);
}

namespace {

// Dirichlet continuation: fields vanish beyond the physical domain
double sample_or_zero(const VectorXd& f, double h, double r_max, double r) {
    if (r > r_max) return 0.0;
    return interp_even(f, h, r);
}

}  // namespace

StatePair to_similarity(const StatePair& phys, const RadialGrid& phys_grid,
                        double t, double T_tilde, const RadialGrid& xi_grid) {
    if (phys.size() != phys_grid.n_points)
        throw std::invalid_argument("to_similarity: state does not match the grid");
    const double lam = T_tilde - t;
    if (!(lam > 0.0))
        throw std::domain_error("to_similarity: need t < T_tilde");
    StatePair sim = StatePair::zero(xi_grid.n_points);
    for (int j = 0; j < xi_grid.n_points; ++j) {
        const double r = lam * xi_grid.r[j];
        sim.u[j] = lam * sample_or_zero(phys.u, phys_grid.h, phys_grid.r_max, r);
        sim.u_hat[j] =
            lam * lam * sample_or_zero(phys.u_hat, phys_grid.h, phys_grid.r_max, r);
    }
    return sim;
}

StatePair from_similarity(const StatePair& sim, const RadialGrid& xi_grid,
                          double tau, const SimilarityFrame& frame,
                          const RadialGrid& phys_grid) {
    if (sim.size() != xi_grid.n_points)
        throw std::invalid_argument("from_similarity: state does not match the grid");
    const double lam = frame.scale(tau);
    if (!(lam > 0.0))
        throw std::domain_error("from_similarity: frame scale must be positive");
    StatePair phys = StatePair::zero(phys_grid.n_points);
    for (int j = 0; j < phys_grid.n_points; ++j) {
        const double xi = phys_grid.r[j] / lam;
        phys.u[j] = sample_or_zero(sim.u, xi_grid.h, xi_grid.r_max, xi) / lam;
        phys.u_hat[j] =
            sample_or_zero(sim.u_hat, xi_grid.h, xi_grid.r_max, xi) / (lam * lam);
    }
    return phys;
}

void sim_rhs(const StatePair& s, const RadialGrid& xi_grid,
             const NonlinearityContext& ctx, SimRhsMode mode,
             const VectorXd& V, StatePair& out) {
    const int N = xi_grid.n_points;
    out.u.resize(N);
    out.u_hat.resize(N);
    static thread_local VectorXd scratch;
    scratch.resize(N);
    radial_upwind_apply(xi_grid, s.u, out.u);  // xi d_xi U, upwinded
    out.u = s.u_hat - s.u - out.u;
    laplacian_open_apply(xi_grid, ctx.n, s.u, out.u_hat);
    radial_upwind_apply(xi_grid, s.u_hat, scratch);
    out.u_hat -= 2.0 * s.u_hat + scratch;
    if (mode == SimRhsMode::full) {
        out.u_hat += n0_apply(s.u, xi_grid, ctx);
    } else {
        out.u_hat.array() += V.array() * s.u.array();
    }
}

SimTrajectory evolve_similarity(const StatePair& initial, const RadialGrid& xi_grid,
                                int n, double tau_span, const SimEvolveOptions& opt) {
    const int N = xi_grid.n_points;
    if (initial.size() != N)
        throw std::invalid_argument("evolve_similarity: data does not match the grid");
    if (!(tau_span >= 0.0))
        throw std::invalid_argument("evolve_similarity: tau_span must be nonnegative");
    if (opt.project_out_gauge &&
        (opt.gauge == nullptr || opt.cogauge == nullptr))
        throw std::invalid_argument(
            "evolve_similarity: gauge projection needs gauge and cogauge pairs");
    if (!(opt.cfl > 0.0) || opt.cfl > 1.0)
        throw std::invalid_argument("evolve_similarity: cfl must lie in (0, 1]");

    NonlinearityContext ctx;
    ctx.n = n;
    VectorXd V;
    if (opt.mode != SimRhsMode::full) V = potential_V_samples(xi_grid, n);
    VectorXd w;
    if (opt.project_out_gauge) w = cell_weights(xi_grid, n);

    const double dtau_max = opt.cfl * xi_grid.h / (xi_grid.r_max + 1.0);
    int steps = 0;
    double dtau = 0.0;
    if (tau_span > 0.0) {
        steps = std::max(1, static_cast<int>(std::ceil(tau_span / dtau_max - 1e-12)));
        // when the span is a whole number of frame strides, land the steps
        // exactly on the frame lattice so recorded frames carry no phase error
        if (opt.frame_stride > 0.0) {
            const double ratio = tau_span / opt.frame_stride;
            const double n_str = std::round(ratio);
            if (n_str >= 1.0 && std::abs(ratio - n_str) < 1e-9) {
                const int per = std::max(
                    1, static_cast<int>(std::ceil(opt.frame_stride / dtau_max - 1e-12)));
                steps = static_cast<int>(n_str) * per;
            }
        }
        dtau = tau_span / steps;
    }

    SimTrajectory traj;
    traj.dtau = dtau;
    StatePair s = initial;

    auto project = [&](StatePair& x) {
        if (!opt.project_out_gauge) return;
        const double c = pair_wdot(*opt.cogauge, x, w);
        x.u -= c * opt.gauge->u;
        x.u_hat -= c * opt.gauge->u_hat;
    };
    project(s);

    double next_frame = 0.0;
    auto record = [&](double tau, const StatePair& x) {
        if (opt.frame_stride <= 0) return;
        if (tau + 1e-12 < next_frame) return;
        traj.taus.push_back(tau);
        traj.frames.push_back(x);
        while (next_frame <= tau + 1e-12) next_frame += opt.frame_stride;
    };
    record(0.0, s);

    const bool forced = opt.mode == SimRhsMode::linearized_forced &&
                        static_cast<bool>(opt.source);
    StatePair k1 = StatePair::zero(N), k2 = StatePair::zero(N);
    StatePair k3 = StatePair::zero(N), k4 = StatePair::zero(N);
    StatePair tmp = StatePair::zero(N), G;
    auto rhs_at = [&](double tau, const StatePair& x, StatePair& k) {
        sim_rhs(x, xi_grid, ctx, opt.mode, V, k);
        if (forced) {
            opt.source(tau, G);
            project(G);
            k.u += G.u;
            k.u_hat += G.u_hat;
        }
    };

    for (int i = 0; i < steps; ++i) {
        const double tau = i * dtau;
        rhs_at(tau, s, k1);
        tmp.u = s.u + (0.5 * dtau) * k1.u;
        tmp.u_hat = s.u_hat + (0.5 * dtau) * k1.u_hat;
        rhs_at(tau + 0.5 * dtau, tmp, k2);
        tmp.u = s.u + (0.5 * dtau) * k2.u;
        tmp.u_hat = s.u_hat + (0.5 * dtau) * k2.u_hat;
        rhs_at(tau + 0.5 * dtau, tmp, k3);
        tmp.u = s.u + dtau * k3.u;
        tmp.u_hat = s.u_hat + dtau * k3.u_hat;
        rhs_at(tau + dtau, tmp, k4);
        s.u += (dtau / 6.0) * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        s.u_hat += (dtau / 6.0) * (k1.u_hat + 2.0 * k2.u_hat + 2.0 * k3.u_hat + k4.u_hat);
        project(s);
        if (!s.u.allFinite() || !s.u_hat.allFinite()) {
            std::ostringstream msg;
            msg << "evolve_similarity: diverged at tau = " << (i + 1) * dtau;
            throw std::runtime_error(msg.str());
        }
        record((i + 1) * dtau, s);
    }
    traj.final = s;
    return traj;
}

MatrixXd linearized_matrix(const RadialGrid& xi_grid, int n) {
    const int N = xi_grid.n_points;
    NonlinearityContext ctx;
    ctx.n = n;
    const VectorXd V = potential_V_samples(xi_grid, n);
    MatrixXd L(2 * N, 2 * N);
    StatePair e = StatePair::zero(N);
    StatePair out = StatePair::zero(N);
    for (int j = 0; j < 2 * N; ++j) {
        e.u.setZero();
        e.u_hat.setZero();
        if (j < N)
            e.u[j] = 1.0;
        else
            e.u_hat[j - N] = 1.0;
        sim_rhs(e, xi_grid, ctx, SimRhsMode::linearized, V, out);
        L.col(j).head(N) = out.u;
        L.col(j).tail(N) = out.u_hat;
    }
    return L;
}

SpectrumResult spectrum(const RadialGrid& xi_grid, int n, int count) {
    if (count < 1)
        throw std::invalid_argument("spectrum: count must be positive");
    const MatrixXd L = linearized_matrix(xi_grid, n);
    Eigen::EigenSolver<MatrixXd> es(L, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectrum: eigen-decomposition failed");
    std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                         es.eigenvalues().data() + 2 * xi_grid.n_points);
    // deterministic order: Re descending, then |Im| ascending, then Im descending
    std::sort(ev.begin(), ev.end(), [](const std::complex<double>& a,
                                       const std::complex<double>& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
        if (ia != ib) return ia < ib;
        return a.imag() > b.imag();
    });
    SpectrumResult res;
    res.gauge_eigenvalue_residual = std::abs(ev.front() - std::complex<double>(1.0, 0.0));
    for (const std::complex<double>& z : ev)
        res.gauge_eigenvalue_residual =
            std::min(res.gauge_eigenvalue_residual, std::abs(z - std::complex<double>(1.0, 0.0)));
    const int m = std::min<int>(count, static_cast<int>(ev.size()));
    res.eigenvalues.assign(ev.begin(), ev.begin() + m);
    return res;
}

}  // namespace corowave
