#include "corowave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "corowave/interp.hpp"
#include "corowave/profiles.hpp"

namespace corowave {

void SolverConfig::validate(const RadialGrid& grid) const {
    if (grid.n_points < 8)
        throw std::invalid_argument("SolverConfig: grid too small");
    if (!(dt_factor > 0.0) || dt_factor > 1.0)
        throw std::invalid_argument("SolverConfig: dt_factor must lie in (0, 1]");
    if (!(amp_threshold > 0.0) || !(norm_threshold > 0.0))
        throw std::invalid_argument("SolverConfig: thresholds must be positive");
    if (!(t_final > 0.0))
        throw std::invalid_argument("SolverConfig: t_final must be positive");
    if (fit_window < 8)
        throw std::invalid_argument("SolverConfig: fit_window must be >= 8");
    if (fit_skip < 0)
        throw std::invalid_argument("SolverConfig: fit_skip must be >= 0");
    if (norm_check_stride < 1)
        throw std::invalid_argument("SolverConfig: norm_check_stride must be >= 1");
    for (double lv : measure_levels)
        if (!(lv > 0.0) || lv > 1.0)
            throw std::invalid_argument("SolverConfig: measure_levels must lie in (0, 1]");
    NonlinearityContext ctx;
    ctx.n = n;
    ctx.taylor_threshold = taylor_threshold;
    ctx.validate();
}

namespace {

// acceleration of the second-order form: Laplacian u + n0(u), with the
// nonlinearity argument shifted to w + z(t) in dpd mode
void acceleration(const StatePair& s, double t, const RadialGrid& grid,
                  const SolverConfig& cfg, const ModalBasis* basis,
                  const ZPath* zpath, VectorXd& acc, VectorXd& zc, VectorXd& zhc,
                  VectorXd& arg) {
    laplacian_apply(grid, cfg.n, s.u, acc);
    if (!cfg.nonlinearity) return;
    NonlinearityContext ctx;
    ctx.n = cfg.n;
    ctx.taylor_threshold = cfg.taylor_threshold;
    if (zpath != nullptr) {
        zpath_coeffs_at(*zpath, t, zc, zhc);
        arg = s.u + basis->modes().leftCols(zc.size()) * zc;
        acc += n0_apply(arg, grid, ctx);
    } else {
        acc += n0_apply(s.u, grid, ctx);
    }
}

// modal z synthesized on the grid; (field, field_hat) at time t
void z_fields(const ZPath& zpath, const ModalBasis& basis, double t,
              VectorXd& zf, VectorXd& zhf) {
    VectorXd zc, zhc;
    zpath_coeffs_at(zpath, t, zc, zhc);
    zf = basis.modes().leftCols(zc.size()) * zc;
    zhf = basis.modes().leftCols(zhc.size()) * zhc;
}

// shared similarity-grid basis for profile-discrepancy measurements; built
// once per ambient dimension (solves run concurrently, hence the lock)
const ModalBasis& xi_basis_for(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<ModalBasis>> cache;
    std::scoped_lock lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        const RadialGrid xg = RadialGrid::make(10.0, 256);
        slot = std::make_unique<ModalBasis>(ModalBasis::build(xg, n));
    }
    return *slot;
}

}  // namespace

void solver_step(StatePair& state, double t, double dt, const RadialGrid& grid,
                 const SolverConfig& cfg, const ModalBasis* basis,
                 const NoisePath* noise, int noise_step, const ZPath* zpath) {
    const bool dpd = cfg.mode == SolveMode::dpd;
    if (dpd && zpath == nullptr)
        throw std::invalid_argument("solver_step: dpd mode needs a modal z path");
    if ((dpd || noise != nullptr) && basis == nullptr)
        throw std::invalid_argument("solver_step: modal synthesis needs a basis");
    const ZPath* zarg = dpd ? zpath : nullptr;
    VectorXd acc, zc, zhc, arg;
    acceleration(state, t, grid, cfg, basis, zarg, acc, zc, zhc, arg);
    state.u_hat += (0.5 * dt) * acc;
    if (!dpd && noise != nullptr) {
        if (noise_step < 0 || noise_step >= noise->steps)
            throw std::out_of_range("solver_step: noise step outside the path");
        const VectorXd incr = noise->incr.row(noise_step).transpose();
        state.u_hat += basis->modes().leftCols(incr.size()) * incr;
    }
    state.u += dt * state.u_hat;
    acceleration(state, t + dt, grid, cfg, basis, zarg, acc, zc, zhc, arg);
    state.u_hat += (0.5 * dt) * acc;
}

BlowupReport solve(const SolverConfig& cfg, const RadialGrid& grid,
                   const StatePair& initial, const ModalBasis* basis,
                   const NoisePath* noise, const ZPath* zpath,
                   const SobolevOrder& order, const TrajectoryRecorder* rec) {
    cfg.validate(grid);
    if (initial.size() != grid.n_points)
        throw std::invalid_argument("solve: initial data does not match the grid");
    const bool dpd = cfg.mode == SolveMode::dpd;
    if (dpd && zpath == nullptr)
        throw std::invalid_argument("solve: dpd mode needs a modal z path");
    if ((dpd || noise != nullptr) && basis == nullptr)
        throw std::invalid_argument("solve: modal synthesis needs a basis");
    if (basis != nullptr && basis->grid().n_points != grid.n_points)
        throw std::invalid_argument("solve: basis grid does not match the solve grid");

    const double dt = cfg.dt(grid);
    const int total_steps = static_cast<int>(std::ceil(cfg.t_final / dt - 1e-12));
    if (noise != nullptr) {
        if (std::abs(noise->dt - dt) > 1e-12 * dt)
            throw std::invalid_argument("solve: noise path dt does not match the scheme dt");
        if (noise->steps < total_steps)
            throw std::invalid_argument("solve: noise path shorter than the time span");
    }

    std::vector<double> levels = cfg.measure_levels;
    std::sort(levels.begin(), levels.end());
    size_t next_level = 0;

    BlowupReport rep;
    StatePair state = initial;
    StatePair last_good = initial;
    double last_good_t = 0.0;

    VectorXd zf, zhf;  // physical z fields (dpd bookkeeping only)
    auto physical = [&](const StatePair& s, double tt) -> StatePair {
        if (!dpd) return s;
        z_fields(*zpath, *basis, tt, zf, zhf);
        return {s.u + zf, s.u_hat + zhf};
    };
    auto central_of = [&](const StatePair& s, double tt) -> double {
        if (!dpd) return s.u[0];
        VectorXd zc, zhc;
        zpath_coeffs_at(*zpath, tt, zc, zhc);
        return s.u[0] + basis->modes().row(0).head(zc.size()).dot(zc);
    };

    std::vector<StatePair> snaps;
    std::vector<double> snap_t;

    double t = 0.0;
    rep.central_t.push_back(0.0);
    rep.central_u.push_back(central_of(state, 0.0));
    double amp0 = state.u.cwiseAbs().maxCoeff();
    if (dpd) amp0 = physical(state, 0.0).u.cwiseAbs().maxCoeff();
    rep.sup_amp = amp0;
    double next_rec = 0.0;
    if (rec != nullptr && rec->stride > 0 && rec->sink) {
        rec->sink(0.0, physical(state, 0.0));
        next_rec = rec->stride;
    }

    for (int i = 0; i < total_steps; ++i) {
        solver_step(state, t, dt, grid, cfg, basis, noise, i, zpath);
        t = (i + 1) * dt;

        if (!state.u.allFinite() || !state.u_hat.allFinite()) {
            rep.blew_up = true;
            rep.trigger = "divergence";
            rep.t_exit = t;
            break;
        }

        StatePair phys = physical(state, t);
        const double amp = phys.u.cwiseAbs().maxCoeff();
        rep.sup_amp = std::max(rep.sup_amp, amp);
        const double central = dpd ? phys.u[0] : state.u[0];
        rep.central_t.push_back(t);
        rep.central_u.push_back(central);
        last_good = phys;
        last_good_t = t;

        while (next_level < levels.size() &&
               std::abs(central) >= levels[next_level] * cfg.amp_threshold) {
            snaps.push_back(phys);
            snap_t.push_back(t);
            ++next_level;
        }

        if (rec != nullptr && rec->stride > 0 && rec->sink && t + 1e-12 >= next_rec) {
            rec->sink(t, phys);
            next_rec += rec->stride;
        }

        if (amp >= cfg.amp_threshold) {
            rep.blew_up = true;
            rep.trigger = "amplitude";
            rep.t_exit = t;
            break;
        }
        if (basis != nullptr && (i + 1) % cfg.norm_check_stride == 0) {
            const SobolevNorm nrm = basis->sobolev(phys, order, /*diagnostic=*/true);
            if (nrm.total >= cfg.norm_threshold) {
                rep.blew_up = true;
                rep.trigger = "norm";
                rep.t_exit = t;
                break;
            }
        }
    }
    if (!rep.blew_up) rep.t_exit = cfg.t_final;

    if (basis != nullptr && last_good.size() == basis->grid().n_points) {
        const SobolevNorm nrm = basis->sobolev(last_good, order, /*diagnostic=*/true);
        rep.exit_norm_s = nrm.total;
        rep.exit_norm_k = std::hypot(nrm.hk_u, nrm.hk_v);
    }
    rep.exit_energy = energy(last_good, grid, cfg.n, /*geometric=*/true);

    if (rep.blew_up) {
        try {
            const BlowupFit fit = fit_blowup_time(rep.central_t, rep.central_u,
                                                  cfg.fit_window, cfg.fit_skip);
            rep.T_hat = fit.T_hat;
            rep.fit_ok = true;
            rep.fit_monotone = fit.monotone;
            rep.fit_drift = fit.drift;
        } catch (const std::exception&) {
            rep.fit_ok = false;
        }
    }

    if (rep.fit_ok) {
        const ModalBasis& xb = xi_basis_for(cfg.n);
        const int d = cfg.n - 2;
        for (size_t s = 0; s < snaps.size(); ++s) {
            if (!(snap_t[s] < rep.T_hat)) continue;
            const Discrepancy disc =
                psi_discrepancy(snaps[s], grid, snap_t[s], rep.T_hat, d, xb, order);
            rep.disc_t.push_back(snap_t[s]);
            rep.disc_sup.push_back(disc.sup);
            rep.disc_sobolev.push_back(disc.sobolev);
        }
        if (last_good_t < rep.T_hat) {
            const Discrepancy disc =
                psi_discrepancy(last_good, grid, last_good_t, rep.T_hat, d, xb, order);
            rep.profile_err_final = disc.sup;
        } else if (!rep.disc_sup.empty()) {
            rep.profile_err_final = rep.disc_sup.back();
        }
    }
    return rep;
}

Discrepancy psi_discrepancy(const StatePair& state, const RadialGrid& grid,
                            double t, double T_hat, int d,
                            const ModalBasis& xi_basis, const SobolevOrder& order) {
    if (!(t < T_hat))
        throw std::domain_error("psi_discrepancy: need t < T_hat");
    const RadialGrid& xg = xi_basis.grid();
    const double lam = T_hat - t;
    const int N = xg.n_points;
    StatePair psi = StatePair::zero(N);
    int last = -1;
    for (int j = 0; j < N; ++j) {
        const double r = lam * xg.r[j];
        if (r > grid.r_max) break;  // similarity window leaves the physical domain
        last = j;
        psi.u[j] = lam * interp_even(state.u, grid.h, r) - phi(xg.r[j], d);
        psi.u_hat[j] = lam * lam * interp_even(state.u_hat, grid.h, r) - phi_hat(xg.r[j], d);
    }
    Discrepancy out;
    for (int j = 0; j <= last; ++j) out.sup = std::max(out.sup, std::abs(psi.u[j]));
    // cos^2 taper over [0.8, 0.95] xi_max: the surrogate Sobolev norm must not
    // see the outflow fringe of the similarity window
    const double a = 0.80 * xg.r_max;
    const double b = 0.95 * xg.r_max;
    for (int j = 0; j < N; ++j) {
        const double xi = xg.r[j];
        double w = 1.0;
        if (j > last || xi >= b) {
            w = 0.0;
        } else if (xi > a) {
            const double c = std::cos(0.5 * M_PI * (xi - a) / (b - a));
            w = c * c;
        }
        psi.u[j] *= w;
        psi.u_hat[j] *= w;
    }
    const SobolevNorm nrm = xi_basis.sobolev(psi, order, /*diagnostic=*/true);
    out.sobolev = nrm.total;
    return out;
}

BlowupFit estimate_T_tilde(const std::vector<double>& times,
                           const std::vector<double>& central,
                           int window, int skip) {
    return fit_blowup_time(times, central, window, skip);
}

PicardResult picard_mild_solve(const StatePair& initial, const ZPath* zpath,
                               double t_span, int iterations,
                               const ModalBasis& basis,
                               const NonlinearityContext& ctx,
                               int quad_points, double tol) {
    if (!(t_span > 0.0))
        throw std::invalid_argument("picard_mild_solve: t_span must be positive");
    if (quad_points < 2)
        throw std::invalid_argument("picard_mild_solve: need at least 2 quadrature panels");
    if (iterations < 1)
        throw std::invalid_argument("picard_mild_solve: need at least 1 iteration");
    const RadialGrid& grid = basis.grid();
    const int N = grid.n_points;
    if (initial.size() != N)
        throw std::invalid_argument("picard_mild_solve: data does not match the basis grid");
    const int P = quad_points;
    const double ds = t_span / P;
    const int K = basis.size();
    const VectorXd& lam = basis.eigenvalues();
    VectorXd omega(K);
    for (int k = 0; k < K; ++k) omega[k] = std::sqrt(std::max(0.0, lam[k]));

    // homogeneous part, modal: a(t) = cos(w t) a0 + t sinc(w t) b0,
    //                          b(t) = -w sin(w t) a0 + cos(w t) b0
    const VectorXd a0 = basis.coeffs(initial.u);
    const VectorXd b0 = basis.coeffs(initial.u_hat);
    MatrixXd ah(K, P + 1), bh(K, P + 1);
    for (int i = 0; i <= P; ++i) {
        const double s = i * ds;
        for (int k = 0; k < K; ++k) {
            const double th = omega[k] * s;
            const double c = std::cos(th);
            const double sn = s * sinc_fn(th);
            ah(k, i) = c * a0[k] + sn * b0[k];
            bh(k, i) = -omega[k] * std::sin(th) * a0[k] + c * b0[k];
        }
    }

    // z fields on the lattice
    MatrixXd zfield = MatrixXd::Zero(N, P + 1);
    if (zpath != nullptr) {
        VectorXd zf, zhf;
        for (int i = 0; i <= P; ++i) {
            z_fields(*zpath, basis, i * ds, zf, zhf);
            zfield.col(i) = zf;
        }
    }

    MatrixXd w(N, P + 1), wn(N, P + 1), what(N, P + 1);
    for (int i = 0; i <= P; ++i) w.col(i) = basis.synth(ah.col(i));

    PicardResult res;
    double prev_diff = -1.0;
    MatrixXd fc(K, P + 1);
    VectorXd arg(N), acc_a(K), acc_b(K);
    for (int m = 0; m < iterations; ++m) {
        for (int j = 0; j <= P; ++j) {
            arg = w.col(j) + zfield.col(j);
            fc.col(j) = basis.coeffs(n0_apply(arg, grid, ctx));
        }
        for (int i = 0; i <= P; ++i) {
            acc_a.setZero();
            acc_b.setZero();
            for (int j = 0; j <= i; ++j) {
                const double wgt = (j == 0 || j == i) ? 0.5 * ds : ds;
                const double gap = (i - j) * ds;
                for (int k = 0; k < K; ++k) {
                    const double th = omega[k] * gap;
                    acc_a[k] += wgt * gap * sinc_fn(th) * fc(k, j);
                    acc_b[k] += wgt * std::cos(th) * fc(k, j);
                }
            }
            wn.col(i) = basis.synth(ah.col(i) + acc_a);
            what.col(i) = basis.synth(bh.col(i) + acc_b);
        }
        const double diff = (wn - w).cwiseAbs().maxCoeff();
        w.swap(wn);
        res.iterations = m + 1;
        if (prev_diff > 0.0) res.contraction.push_back(diff / prev_diff);
        if (diff <= tol) {
            res.converged = true;
            break;
        }
        if (res.contraction.size() >= 2 && res.contraction.back() >= 1.0 &&
            res.contraction[res.contraction.size() - 2] >= 1.0) {
            std::ostringstream msg;
            msg << "picard_mild_solve: iteration not contracting, factors";
            for (double f : res.contraction) msg << ' ' << f;
            throw std::runtime_error(msg.str());
        }
        prev_diff = diff;
    }
    res.end_state = StatePair(w.col(P), what.col(P));
    return res;
}

}  // namespace corowave
