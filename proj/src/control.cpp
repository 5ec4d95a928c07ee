#include "corowave/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace corowave {

void SteeringProblem::validate(int grid_points) const {
    if (u0.size() != grid_points || u1.size() != grid_points)
        throw std::invalid_argument("SteeringProblem: endpoint pairs do not match the grid");
    if (!u0.u.allFinite() || !u0.u_hat.allFinite() || !u1.u.allFinite() ||
        !u1.u_hat.allFinite())
        throw std::invalid_argument("SteeringProblem: non-finite endpoint data");
    if (!(T1 > 0))
        throw std::invalid_argument("SteeringProblem: T1 must be positive");
}

namespace {

// cubic Hermite weights on the unit interval
inline double h00(double s) { return 1.0 + s * s * (2.0 * s - 3.0); }
inline double h01(double s) { return s * s * (3.0 - 2.0 * s); }
inline double h00p(double s) { return 6.0 * s * (s - 1.0); }
inline double h01p(double s) { return 6.0 * s * (1.0 - s); }

// velocity weights built from the resolvent R = (1+lambda)^{-1} and the
// semigroup P(s) = e^{-s(1+lambda)}; A(0)=A(1)=0, A'(0)=1, A'(1)=0 for every
// mu > 0, so the endpoint identities are exact mode by mode
struct VelocityWeights {
    double A, B, Ap, Bp;

    VelocityWeights(double s, double mu) {
        const double R = 1.0 / mu;
        const double P1 = std::exp(-mu);
        const double edge = R - R * R + R * R * P1;
        const double Ps = std::exp(-s * mu);
        const double Qs = std::exp(-(1.0 - s) * mu);
        A = -h01(s) * edge - R * ((1.0 - s) * Ps - 1.0 - R * Ps + R);
        Ap = -h01p(s) * edge + (1.0 - s) * Ps;
        B = h01(1.0 - s) * edge + R * (s * Qs - 1.0 - R * Qs + R);
        Bp = -h01p(1.0 - s) * edge + s * Qs;
    }
};

}  // namespace

SteeringTrajectory steering_state(const SteeringProblem& problem,
                                  const ModalBasis& basis, int steps) {
    problem.validate(basis.grid().n_points);
    if (steps < 1) throw std::invalid_argument("steering_state: steps must be >= 1");

    const VectorXd a0 = basis.coeffs(problem.u0.u);
    const VectorXd b0 = basis.coeffs(problem.u0.u_hat);
    const VectorXd a1 = basis.coeffs(problem.u1.u);
    const VectorXd b1 = basis.coeffs(problem.u1.u_hat);
    const VectorXd& lam = basis.eigenvalues();
    const int K = basis.size();
    const double T1 = problem.T1;

    SteeringTrajectory traj;
    traj.dt = T1 / steps;
    traj.t.resize(steps + 1);
    traj.u.assign(steps + 1, VectorXd(K));
    traj.u_hat.assign(steps + 1, VectorXd(K));

    for (int i = 0; i <= steps; ++i) {
        const double s = static_cast<double>(i) / steps;
        traj.t[i] = s * T1;
        const double c00 = h00(s), c01 = h01(s);
        const double d00 = h00p(s) / T1, d01 = h01p(s) / T1;
        for (int k = 0; k < K; ++k) {
            const VelocityWeights w(s, 1.0 + lam[k]);
            traj.u[i][k] =
                c00 * a0[k] + c01 * a1[k] + T1 * (w.A * b0[k] + w.B * b1[k]);
            traj.u_hat[i][k] =
                d00 * a0[k] + d01 * a1[k] + w.Ap * b0[k] + w.Bp * b1[k];
        }
    }
    return traj;
}

std::vector<VectorXd> forcing_from_state(const SteeringTrajectory& traj,
                                         const ModalBasis& basis,
                                         const NonlinearityContext& ctx) {
    const int count = static_cast<int>(traj.u.size());
    if (count < 2) throw std::invalid_argument("forcing_from_state: trajectory too short");
    const int K = basis.size();
    const VectorXd& lam = basis.eigenvalues();
    const RadialGrid& grid = basis.grid();

    // integrand Laplacian u + n0(u) in modal coefficients
    std::vector<VectorXd> integrand(count);
    for (int i = 0; i < count; ++i) {
        const VectorXd field = basis.synth(traj.u[i]);
        integrand[i] = basis.coeffs(n0_apply(field, grid, ctx)) -
                       (lam.array() * traj.u[i].array()).matrix();
    }

    std::vector<VectorXd> f(count);
    VectorXd cum = VectorXd::Zero(K);
    f[0] = VectorXd::Zero(K);
    for (int i = 1; i < count; ++i) {
        cum += 0.5 * traj.dt * (integrand[i - 1] + integrand[i]);
        f[i] = traj.u_hat[i] - traj.u_hat[0] - cum;
    }
    return f;
}

ZPath z_from_forcing(const std::vector<VectorXd>& f, double f_dt,
                     const ModalBasis& basis, double dt_out, double t_end) {
    if (f.size() < 2) throw std::invalid_argument("z_from_forcing: need >= 2 samples");
    if (!(f_dt > 0) || !(dt_out > 0) || !(t_end > 0))
        throw std::invalid_argument("z_from_forcing: nonpositive stride or span");
    if (f[0].lpNorm<Eigen::Infinity>() != 0.0)
        throw std::invalid_argument("z_from_forcing: f(0) must vanish");
    const int K = static_cast<int>(f[0].size());
    if (K > basis.size())
        throw std::invalid_argument("z_from_forcing: more forcing modes than the basis");
    const int nf = static_cast<int>(f.size());

    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt_out - 1e-9)));
    ZPath zp;
    zp.dt = t_end / steps;
    zp.steps = steps;
    zp.seed = 0;
    zp.z = MatrixXd::Zero(steps + 1, K);
    zp.zhat = MatrixXd::Zero(steps + 1, K);

    VectorXd omega(K);
    for (int k = 0; k < K; ++k) omega[k] = std::sqrt(std::max(0.0, basis.lambda(k)));

    VectorXd z = VectorXd::Zero(K), zh = VectorXd::Zero(K);
    double t = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double target = (i + 1) * zp.dt;
        // split the output step at forcing-panel boundaries; the slope of the
        // piecewise-linear f is constant on each panel, so the oscillator
        // transition below is exact there
        while (t < target - 1e-13 * t_end) {
            int j = static_cast<int>(std::floor(t / f_dt + 1e-12));
            j = std::min(j, nf - 2);
            const double panel_end = std::min(target, (j + 1) * f_dt);
            const double dlt = panel_end - t;
            for (int k = 0; k < K; ++k) {
                const double g = (f[j + 1][k] - f[j][k]) / f_dt;
                const double th = omega[k] * dlt;
                const double c = std::cos(th);
                const double sc = sinc_fn(th);
                const double znew =
                    z[k] * c + zh[k] * dlt * sc + g * dlt * dlt * versinc(th);
                zh[k] = -z[k] * omega[k] * std::sin(th) + zh[k] * c + g * dlt * sc;
                z[k] = znew;
            }
            t = panel_end;
        }
        t = target;
        zp.z.row(i + 1) = z.transpose();
        zp.zhat.row(i + 1) = zh.transpose();
    }
    return zp;
}

namespace {

// dpd re-solve of the translated equation on an exact lattice ending at T1
StatePair resolve_w(const StatePair& w0, double T1, const RadialGrid& grid,
                    const SolverConfig& base_cfg, const ModalBasis& basis,
                    const ZPath& zp, bool& diverged) {
    SolverConfig cfg = base_cfg;
    cfg.mode = SolveMode::dpd;
    const int nt = std::max(1, static_cast<int>(std::llround(T1 / cfg.dt(grid))));
    const double dt = T1 / nt;
    StatePair state = w0;
    diverged = false;
    for (int i = 0; i < nt; ++i) {
        solver_step(state, i * dt, dt, grid, cfg, &basis, nullptr, 0, &zp);
        if ((i & 31) == 31 && (!state.u.allFinite() || !state.u_hat.allFinite())) {
            diverged = true;
            return state;
        }
    }
    if (!state.u.allFinite() || !state.u_hat.allFinite()) diverged = true;
    return state;
}

StatePair add_z_at(const StatePair& w, const ZPath& zp, const ModalBasis& basis,
                   double t) {
    VectorXd zc, zhc;
    zpath_coeffs_at(zp, t, zc, zhc);
    return {w.u + basis.modes().leftCols(zc.size()) * zc,
            w.u_hat + basis.modes().leftCols(zhc.size()) * zhc};
}

}  // namespace

SteeringReport verify_steering(const SteeringProblem& problem,
                               const RadialGrid& grid, const ModalBasis& basis,
                               const SolverConfig& solver_cfg,
                               const SobolevOrder& order, bool with_continuity,
                               int trajectory_steps,
                               const std::vector<double>& continuity_sizes) {
    problem.validate(grid.n_points);
    if (basis.grid().n_points != grid.n_points ||
        std::abs(basis.grid().h - grid.h) > 1e-15)
        throw std::invalid_argument("verify_steering: basis grid does not match");

    NonlinearityContext ctx;
    ctx.n = solver_cfg.n;
    ctx.taylor_threshold = solver_cfg.taylor_threshold;

    const SteeringTrajectory traj = steering_state(problem, basis, trajectory_steps);
    const std::vector<VectorXd> f = forcing_from_state(traj, basis, ctx);
    const int nt =
        std::max(1, static_cast<int>(std::llround(problem.T1 / solver_cfg.dt(grid))));
    const ZPath zp =
        z_from_forcing(f, traj.dt, basis, problem.T1 / nt, problem.T1);

    SteeringReport report;
    bool diverged = false;
    const StatePair w_end =
        resolve_w(problem.u0, problem.T1, grid, solver_cfg, basis, zp, diverged);
    if (diverged) {
        report.solver_diverged = true;
        report.endpoint_sup = std::numeric_limits<double>::infinity();
        report.endpoint_sobolev = std::numeric_limits<double>::infinity();
        return report;
    }
    const StatePair u_end = add_z_at(w_end, zp, basis, problem.T1);
    const StatePair diff(u_end.u - problem.u1.u, u_end.u_hat - problem.u1.u_hat);
    report.endpoint_sup = diff.u.lpNorm<Eigen::Infinity>();
    report.endpoint_sobolev = basis.sobolev(diff, order, true).total;

    if (!with_continuity) return report;

    // smooth probe direction with unit sup norm, supported inside the domain
    VectorXd bump(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = (grid.r[j] - 0.3 * grid.r_max) / (0.15 * grid.r_max);
        bump[j] = std::exp(-x * x);
    }

    for (double size : continuity_sizes) {
        StatePair u0p(problem.u0.u + size * bump, problem.u0.u_hat);
        bool dvg = false;
        const StatePair wp =
            resolve_w(u0p, problem.T1, grid, solver_cfg, basis, zp, dvg);
        ContinuityRow row;
        row.which = "u0";
        row.size = size;
        row.endpoint_shift =
            dvg ? std::numeric_limits<double>::infinity()
                : (add_z_at(wp, zp, basis, problem.T1).u - u_end.u)
                      .lpNorm<Eigen::Infinity>();
        report.continuity.push_back(row);
    }
    for (double size : continuity_sizes) {
        ZPath zpp = zp;
        zpp.z *= (1.0 + size);
        zpp.zhat *= (1.0 + size);
        bool dvg = false;
        const StatePair wp =
            resolve_w(problem.u0, problem.T1, grid, solver_cfg, basis, zpp, dvg);
        ContinuityRow row;
        row.which = "z";
        row.size = size;
        row.endpoint_shift =
            dvg ? std::numeric_limits<double>::infinity()
                : (add_z_at(wp, zpp, basis, problem.T1).u - u_end.u)
                      .lpNorm<Eigen::Infinity>();
        report.continuity.push_back(row);
    }
    return report;
}

}  // namespace corowave
