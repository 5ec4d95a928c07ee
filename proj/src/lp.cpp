#include "corowave/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "corowave/interp.hpp"

#include "json.hpp"

namespace corowave {

namespace {

using nlohmann::json;

VectorXd stack_pair(const StatePair& s) {
    VectorXd y(2 * s.size());
    y.head(s.size()) = s.u;
    y.tail(s.size()) = s.u_hat;
    return y;
}

StatePair unstack_pair(const VectorXd& y) {
    const int N = static_cast<int>(y.size()) / 2;
    return {y.head(N), y.tail(N)};
}

// inverse iteration for the eigenvector of A nearest the shift, from a seed
VectorXd inverse_iterate(const Eigen::PartialPivLU<MatrixXd>& lu, VectorXd x) {
    x.normalize();
    for (int it = 0; it < 60; ++it) {
        VectorXd next = lu.solve(x);
        next.normalize();
        if (next.dot(x) < 0) next = -next;
        const double delta = (next - x).norm();
        x = next;
        if (delta < 1e-14) break;
    }
    return x;
}

}  // namespace

StatePair LinearizedOperator::project(const StatePair& f) const {
    const double c = pairing(f);
    return {c * gauge.u, c * gauge.u_hat};
}

StatePair LinearizedOperator::project_out(const StatePair& f) const {
    const double c = pairing(f);
    return {f.u - c * gauge.u, f.u_hat - c * gauge.u_hat};
}

double LinearizedOperator::gauge_residual() const {
    const VectorXd y = stack_pair(gauge);
    const VectorXd res = L * y - y;
    const int N = xi_grid.n_points;
    const double cutoff = xi_grid.r_max - 5.0 * xi_grid.h;
    double num = 0, den = 0;
    for (int j = 0; j < N; ++j) {
        if (xi_grid.r[j] > cutoff) continue;
        num += (res[j] * res[j] + res[N + j] * res[N + j]) * w[j];
        den += (y[j] * y[j] + y[N + j] * y[N + j]) * w[j];
    }
    return std::sqrt(num / den);
}

double LinearizedOperator::projector_defect() const {
    const double gc = pairing(gauge);
    return std::abs(gc - 1.0) * pair_wnorm(gauge, w) * pair_wnorm(cogauge, w);
}

LinearizedOperator build_linearizedoperator_impl(const RadialGrid& xi_grid, int n) {
    LinearizedOperator op;
    op.xi_grid = xi_grid;
    op.n = n;
    op.L = linearized_matrix(xi_grid, n);
    op.w = cell_weights(xi_grid, n);
    const int N = xi_grid.n_points;

    // shifted LU once; both eigenvectors come from the same factorization
    const double shift = 1.0 + 1e-8;
    MatrixXd A = op.L;
    A.diagonal().array() -= shift;
    Eigen::PartialPivLU<MatrixXd> lu(A);
    Eigen::PartialPivLU<MatrixXd> lut(A.transpose().eval());

    const StatePair g_analytic = gauge_state(xi_grid, n);
    const VectorXd seed = stack_pair(g_analytic);
    VectorXd x = inverse_iterate(lu, seed);
    StatePair g = unstack_pair(x);
    // match the analytic amplitude and orientation
    const double scale = pair_wnorm(g_analytic, op.w) / pair_wnorm(g, op.w);
    const double sign = pair_wdot(g, g_analytic, op.w) >= 0 ? 1.0 : -1.0;
    g.u *= sign * scale;
    g.u_hat *= sign * scale;
    op.gauge = g;

    // plain left eigenvector y of L; the weighted representer is y / w
    VectorXd wp(2 * N);
    wp.head(N) = op.w;
    wp.tail(N) = op.w;
    VectorXd y = inverse_iterate(lut, (wp.array() * x.array()).matrix());
    StatePair c = unstack_pair((y.array() / wp.array()).matrix());
    const double norm = pair_wdot(g, c, op.w);
    if (std::abs(norm) < 1e-14)
        throw std::runtime_error("build_linearized_operator: degenerate gauge pairing");
    c.u /= norm;
    c.u_hat /= norm;
    op.cogauge = c;
    return op;
}

LinearizedOperator build_linearized_operator(const RadialGrid& xi_grid, int n) {
    if (xi_grid.n_points < 16)
        throw std::invalid_argument("build_linearized_operator: grid too small");
    if (n < 5)
        throw std::invalid_argument("build_linearized_operator: need n >= 5");
    return build_linearizedoperator_impl(xi_grid, n);
}

void LPConfig::validate(const SobolevOrder& order, int n, double T) const {
    if (!(delta > 0))
        throw std::invalid_argument("LPConfig: delta must be positive");
    if (!(big_C >= 1.0))
        throw std::invalid_argument("LPConfig: big_C must be >= 1");
    if (!(N_div >= 1.0))
        throw std::invalid_argument("LPConfig: N must be >= 1");
    if (!(delta / N_div <= T / 2))
        throw std::invalid_argument("LPConfig: bracket validity needs delta/N <= T/2");
    const double window = order.s + 1.0 - n / 2.0;
    if (!(omega_bar > 0) || !(omega_bar < window))
        throw std::invalid_argument(
            "LPConfig: omega_bar must lie in (0, s+1-n/2)");
    if (!(tau_max >= 20.0) || !(tau_max * omega_bar >= 3.0))
        throw std::invalid_argument(
            "LPConfig: need tau_max >= 20 and omega_bar*tau_max >= 3");
    if (!(picard_tol > 0) || picard_max_iter < 1)
        throw std::invalid_argument("LPConfig: bad Picard parameters");
    if (!(coeff_tol > 0))
        throw std::invalid_argument("LPConfig: coeff_tol must be positive");
    if (!(quad_stride > 0) || quad_stride > tau_max)
        throw std::invalid_argument("LPConfig: quad_stride must lie in (0, tau_max]");
    if (!(cfl > 0) || cfl > 1.0)
        throw std::invalid_argument("LPConfig: cfl must lie in (0, 1]");
}

StatePair initial_perturbation(const StatePair& u0, const RadialGrid& phys_grid,
                               double T_tilde, double T, const RadialGrid& xi_grid,
                               int d) {
    if (!(T_tilde > 0) || !(T_tilde <= 2 * T))
        throw std::domain_error("initial_perturbation: T_tilde outside (0, 2T]");
    if (u0.size() != phys_grid.n_points)
        throw std::invalid_argument("initial_perturbation: data does not match the grid");
    const int N = xi_grid.n_points;
    StatePair v = StatePair::zero(N);
    for (int j = 0; j < N; ++j) {
        const double r = T_tilde * xi_grid.r[j];
        double uval = 0, uhval = 0;
        if (r <= phys_grid.r_max) {
            uval = interp_even(u0.u, phys_grid.h, r);
            uhval = interp_even(u0.u_hat, phys_grid.h, r);
        }
        v.u[j] = T_tilde * uval - phi(xi_grid.r[j], d);
        v.u_hat[j] = T_tilde * T_tilde * uhval - phi_hat(xi_grid.r[j], d);
    }
    return v;
}

StatePair FrameSeries::at(double tau) const {
    if (frames.empty())
        throw std::domain_error("FrameSeries: empty series");
    if (frames.size() == 1) return frames.front();
    const double x = tau / stride;
    int i = static_cast<int>(std::floor(x));
    i = std::clamp(i, 0, count() - 2);
    const double a = std::clamp(x - i, 0.0, 1.0);
    return {(1.0 - a) * frames[i].u + a * frames[i + 1].u,
            (1.0 - a) * frames[i].u_hat + a * frames[i + 1].u_hat};
}

FrameSeries z_similarity_frames(const ZPath* zpath, const ModalBasis& phys_basis,
                                const SimilarityFrame& frame,
                                const RadialGrid& xi_grid, double tau_max,
                                double stride) {
    FrameSeries out;
    out.stride = stride;
    if (zpath == nullptr) {
        out.stride = tau_max;
        out.frames.assign(2, StatePair::zero(xi_grid.n_points));
        return out;
    }
    const RadialGrid& pg = phys_basis.grid();
    const int steps = static_cast<int>(std::ceil(tau_max / stride - 1e-9));
    out.stride = tau_max / steps;
    out.frames.reserve(steps + 1);
    VectorXd zc, zhc;
    for (int i = 0; i <= steps; ++i) {
        const double tau = i * out.stride;
        const double lam = frame.scale(tau);
        const double t = frame.T_tilde - lam;
        zpath_coeffs_at(*zpath, t, zc, zhc);
        const VectorXd zf = phys_basis.modes().leftCols(zc.size()) * zc;
        const VectorXd zhf = phys_basis.modes().leftCols(zhc.size()) * zhc;
        StatePair Z = StatePair::zero(xi_grid.n_points);
        for (int j = 0; j < xi_grid.n_points; ++j) {
            const double r = lam * xi_grid.r[j];
            if (r > pg.r_max) break;  // fields vanish beyond the physical domain
            Z.u[j] = lam * interp_even(zf, pg.h, r);
            Z.u_hat[j] = lam * lam * interp_even(zhf, pg.h, r);
        }
        out.frames.push_back(std::move(Z));
    }
    return out;
}

namespace {

// exact-weight trapezoid panel of int_0^D e^{-x} [g0 + (g1-g0) x/D] dx
struct ExpPanelWeights {
    double w0 = 0, w1 = 0, decay = 0;
    explicit ExpPanelWeights(double D) {
        decay = std::exp(-D);
        const double total = 1.0 - decay;            // int e^{-x}
        const double ramp = (total - D * decay) / D;  // int e^{-x} x/D
        w0 = total - ramp;
        w1 = ramp;
    }
};

// G(tau) = N(Psi+Z) + V Z on the quadrature lattice; first components vanish
void forcing_frames(const std::vector<StatePair>& psi,
                    const std::vector<StatePair>& z_at, const VectorXd& V,
                    const VectorXd& phi_samples, const RadialGrid& xi_grid,
                    const NonlinearityContext& ctx, std::vector<StatePair>& G,
                    std::vector<double>& gamma, const LinearizedOperator& op) {
    const int count = static_cast<int>(psi.size());
    const int N = xi_grid.n_points;
    G.resize(count);
    gamma.resize(count);
    VectorXd K1(N), N2(N);
    for (int i = 0; i < count; ++i) {
        K1 = psi[i].u + z_at[i].u;
        N_perturbation_second(K1, phi_samples, xi_grid, ctx, N2);
        if (G[i].size() != N) G[i] = StatePair::zero(N);
        G[i].u.setZero();
        G[i].u_hat = N2 + (V.array() * z_at[i].u.array()).matrix();
        gamma[i] = pair_wdot(G[i], op.cogauge, op.w);
    }
}

}  // namespace

CorrectorResult corrector(const StatePair& v, const FrameSeries& psi,
                          const FrameSeries& z, const LinearizedOperator& op,
                          const NonlinearityContext& ctx, double tau_max) {
    if (!(tau_max > 0))
        throw std::domain_error("corrector: tau_max must be positive");
    if (psi.frames.empty() || psi.horizon() + 1e-9 < tau_max)
        throw std::domain_error("corrector: psi frames do not cover [0, tau_max]");
    const RadialGrid& xg = op.xi_grid;
    const int steps = std::max(1, static_cast<int>(std::llround(tau_max / psi.stride)));
    const double stride = tau_max / steps;

    VectorXd phi_samples(xg.n_points);
    const int d = op.n - 2;
    for (int j = 0; j < xg.n_points; ++j) phi_samples[j] = phi(xg.r[j], d);
    const VectorXd V = potential_V_samples(xg, op.n);

    std::vector<StatePair> psi_at(steps + 1), z_at(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        psi_at[i] = psi.at(i * stride);
        z_at[i] = z.at(i * stride);
    }
    std::vector<StatePair> G;
    std::vector<double> gamma;
    forcing_frames(psi_at, z_at, V, phi_samples, xg, ctx, G, gamma, op);

    const ExpPanelWeights pw(stride);
    double integral = 0.0;
    double expf = 1.0;  // e^{-tau_i}
    double supg = 0.0;
    for (int i = 0; i < steps; ++i) {
        integral += expf * (pw.w0 * gamma[i] + pw.w1 * gamma[i + 1]);
        expf *= pw.decay;
        supg = std::max(supg, std::abs(gamma[i]));
    }
    supg = std::max(supg, std::abs(gamma.back()));

    CorrectorResult res;
    res.coeff = pair_wdot(v, op.cogauge, op.w) + integral;
    res.C = StatePair(res.coeff * op.gauge.u, res.coeff * op.gauge.u_hat);
    res.tail_bound = std::exp(-tau_max) * supg;
    return res;
}

FixedPointResult lp_fixed_point(const StatePair& v, const FrameSeries& z,
                                const LinearizedOperator& op, const LPConfig& cfg,
                                const NonlinearityContext& ctx) {
    const RadialGrid& xg = op.xi_grid;
    const int N = xg.n_points;
    if (v.size() != N)
        throw std::invalid_argument("lp_fixed_point: data does not match the grid");

    // smallness gates of the contraction argument: the gauge-orthogonal part of
    // v and the forcing z must sit inside the delta/C ball. The pure-gauge part
    // of v may be large; the corrector removes it exactly, so it never feeds
    // the dynamics, only the root-finding objective.
    const double bound = cfg.delta / cfg.big_C;
    const StatePair v_perp = op.project_out(v);
    const double v_perp_norm = pair_wnorm(v_perp, op.w);
    if (v_perp_norm > bound) {
        std::ostringstream msg;
        msg << "lp_fixed_point: smallness violation, gauge-orthogonal data norm "
            << v_perp_norm << " exceeds delta/C = " << bound;
        throw std::runtime_error(msg.str());
    }
    double z_sup = 0.0;
    for (const StatePair& f : z.frames) z_sup = std::max(z_sup, pair_wnorm(f, op.w));
    if (z_sup > bound) {
        std::ostringstream msg;
        msg << "lp_fixed_point: smallness violation, sup_z " << z_sup
            << " exceeds delta/C = " << bound;
        throw std::runtime_error(msg.str());
    }

    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.tau_max / cfg.quad_stride - 1e-9)));
    const double stride = cfg.tau_max / steps;

    VectorXd phi_samples(N);
    const int d = op.n - 2;
    for (int j = 0; j < N; ++j) phi_samples[j] = phi(xg.r[j], d);
    const VectorXd V = potential_V_samples(xg, op.n);

    std::vector<StatePair> z_at(steps + 1);
    for (int i = 0; i <= steps; ++i) z_at[i] = z.at(i * stride);

    std::vector<StatePair> psi(steps + 1, StatePair::zero(N));
    std::vector<StatePair> G;
    std::vector<double> gamma, a(steps + 1);
    const ExpPanelWeights pw(stride);

    FixedPointResult res;
    res.psi.stride = stride;
    double prev_diff = -1.0;

    SimEvolveOptions opt;
    opt.mode = SimRhsMode::linearized_forced;
    opt.cfl = cfg.cfl;
    opt.frame_stride = stride;
    opt.project_out_gauge = true;
    opt.gauge = &op.gauge;
    opt.cogauge = &op.cogauge;

    for (int sweep = 0; sweep < cfg.picard_max_iter; ++sweep) {
        forcing_frames(psi, z_at, V, phi_samples, xg, ctx, G, gamma, op);

        // gauge coefficient a(tau) = -int_tau^{tau_max} e^{tau-s} gamma(s) ds,
        // backward recurrence with exact exponential panel weights
        a[steps] = 0.0;
        for (int i = steps - 1; i >= 0; --i)
            a[i] = pw.decay * a[i + 1] - (pw.w0 * gamma[i] + pw.w1 * gamma[i + 1]);

        // forward evolve of the gauge-orthogonal part with projected forcing
        opt.source = [&](double tau, StatePair& out) {
            const double x = tau / stride;
            int i = std::clamp(static_cast<int>(std::floor(x)), 0, steps - 1);
            const double alpha = std::clamp(x - i, 0.0, 1.0);
            out.u = (1.0 - alpha) * G[i].u + alpha * G[i + 1].u;
            out.u_hat = (1.0 - alpha) * G[i].u_hat + alpha * G[i + 1].u_hat;
        };
        const SimTrajectory Y =
            evolve_similarity(v_perp, xg, op.n, cfg.tau_max, opt);
        if (static_cast<int>(Y.frames.size()) != steps + 1)
            throw std::runtime_error("lp_fixed_point: frame lattice misaligned");

        double diff = 0.0, wnorm = 0.0;
        for (int i = 0; i <= steps; ++i) {
            StatePair next(Y.frames[i].u + a[i] * op.gauge.u,
                           Y.frames[i].u_hat + a[i] * op.gauge.u_hat);
            StatePair delta(next.u - psi[i].u, next.u_hat - psi[i].u_hat);
            const double weight = std::exp(cfg.omega_bar * i * stride);
            diff = std::max(diff, weight * pair_wnorm(delta, op.w));
            wnorm = std::max(wnorm, weight * pair_wnorm(next, op.w));
            psi[i] = std::move(next);
        }
        res.iterations = sweep + 1;
        res.weighted_norm = wnorm;
        res.defect = diff;
        if (prev_diff > 0.0) res.contraction.push_back(diff / prev_diff);

        if (wnorm > cfg.delta) {
            std::ostringstream msg;
            msg << "lp_fixed_point: weighted norm " << wnorm
                << " left the delta ball " << cfg.delta;
            throw std::runtime_error(msg.str());
        }
        if (diff <= cfg.picard_tol) {
            res.converged = true;
            break;
        }
        const size_t m = res.contraction.size();
        if (m >= 3 && res.contraction[m - 1] >= 1.0 && res.contraction[m - 2] >= 1.0 &&
            res.contraction[m - 3] >= 1.0) {
            std::ostringstream msg;
            msg << "lp_fixed_point: no contraction, factors";
            for (double f : res.contraction) msg << ' ' << f;
            throw std::runtime_error(msg.str());
        }
        prev_diff = diff;
    }

    // corrector data at the fixed point
    forcing_frames(psi, z_at, V, phi_samples, xg, ctx, G, gamma, op);
    double integral = 0.0, expf = 1.0, supg = 0.0;
    for (int i = 0; i < steps; ++i) {
        integral += expf * (pw.w0 * gamma[i] + pw.w1 * gamma[i + 1]);
        expf *= pw.decay;
        supg = std::max(supg, std::abs(gamma[i]));
    }
    supg = std::max(supg, std::abs(gamma.back()));
    res.corrector_coeff = pair_wdot(v, op.cogauge, op.w) + integral;
    res.tail_bound = std::exp(-cfg.tau_max) * supg;
    res.psi.frames = std::move(psi);
    return res;
}

TTildeResult find_T_tilde(const StatePair& u0, const RadialGrid& phys_grid,
                          const ZPath* zpath, const ModalBasis* phys_basis,
                          double T, const LinearizedOperator& op,
                          const LPConfig& cfg, const NonlinearityContext& ctx) {
    cfg.validate(SobolevOrder{}, op.n, T);
    if (zpath != nullptr && phys_basis == nullptr)
        throw std::invalid_argument("find_T_tilde: z path needs the physical basis");

    TTildeResult res;
    const double half = cfg.delta / cfg.N_div;
    const int d = op.n - 2;

    struct Eval {
        double coeff = std::numeric_limits<double>::quiet_NaN();
        bool ok = false;
        FixedPointResult fp;
    };
    auto objective = [&](double T_tilde) {
        Eval e;
        try {
            const StatePair v =
                initial_perturbation(u0, phys_grid, T_tilde, T, op.xi_grid, d);
            SimilarityFrame frame{T_tilde};
            FrameSeries z;
            if (zpath != nullptr) {
                z = z_similarity_frames(zpath, *phys_basis, frame, op.xi_grid,
                                        cfg.tau_max, cfg.quad_stride);
            } else {
                z.stride = cfg.tau_max;
                z.frames.assign(2, StatePair::zero(op.xi_grid.n_points));
            }
            e.fp = lp_fixed_point(v, z, op, cfg, ctx);
            e.coeff = e.fp.corrector_coeff;
            e.ok = true;
        } catch (const std::runtime_error&) {
            e.ok = false;  // smallness or contraction failure at this candidate
        }
        ++res.evaluations;
        return e;
    };

    // 9-point bracket scan
    const int n_scan = 9;
    std::vector<double> ts(n_scan);
    std::vector<Eval> evals(n_scan);
    for (int j = 0; j < n_scan; ++j) {
        ts[j] = T - half + (2.0 * half) * j / (n_scan - 1);
        evals[j] = objective(ts[j]);
        res.scan_T.push_back(ts[j]);
        res.scan_coeff.push_back(evals[j].ok
                                     ? evals[j].coeff
                                     : std::numeric_limits<double>::quiet_NaN());
    }

    // direct hit or the admissible sign-change pair closest to T
    int lo = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_scan; ++j) {
        if (evals[j].ok && std::abs(evals[j].coeff) <= cfg.coeff_tol) {
            res.T_tilde = ts[j];
            res.bracket_found = true;
            res.final_coeff = evals[j].coeff;
            res.tail_bound = evals[j].fp.tail_bound;
            res.contraction = evals[j].fp.contraction;
            res.final_fp = std::move(evals[j].fp);
            return res;
        }
        if (j + 1 < n_scan && evals[j].ok && evals[j + 1].ok &&
            evals[j].coeff * evals[j + 1].coeff < 0) {
            const double mid = 0.5 * (ts[j] + ts[j + 1]);
            if (std::abs(mid - T) < best) {
                best = std::abs(mid - T);
                lo = j;
            }
        }
    }
    if (lo < 0)
        throw std::runtime_error(
            "find_T_tilde: bracket-failure, no sign change of the corrector "
            "coefficient over the scan (realization outside the stable set)");
    res.bracket_found = true;

    double ta = ts[lo], tb = ts[lo + 1];
    double fa = evals[lo].coeff;
    Eval current = std::move(evals[lo]);
    const int max_bisect = 60;
    for (int it = 0; it < max_bisect; ++it) {
        const double tm = 0.5 * (ta + tb);
        Eval em = objective(tm);
        if (!em.ok)
            throw std::runtime_error(
                "find_T_tilde: fixed point failed inside the bracket");
        current = std::move(em);
        res.T_tilde = tm;
        if (std::abs(current.coeff) <= cfg.coeff_tol) break;
        if (fa * current.coeff < 0) {
            tb = tm;
        } else {
            ta = tm;
            fa = current.coeff;
        }
        // the slope of coeff in T_tilde is O(1), so a bracket this narrow
        // already locates the root far below the acceptance tolerance
        if (tb - ta < 1e-7 * std::max(1.0, T)) break;
    }
    res.final_coeff = current.coeff;
    res.tail_bound = current.fp.tail_bound;
    res.contraction = current.fp.contraction;
    res.final_fp = std::move(current.fp);
    return res;
}

std::string TTildeResult::diagnostics_json() const {
    json j;
    j["T_tilde"] = T_tilde;
    j["bracket_found"] = bracket_found;
    j["evaluations"] = evaluations;
    j["final_coeff"] = final_coeff;
    j["tail_bound"] = tail_bound;
    j["scan"] = json::array();
    for (size_t i = 0; i < scan_T.size(); ++i) {
        json row;
        row["T"] = scan_T[i];
        if (std::isfinite(scan_coeff[i]))
            row["coeff"] = scan_coeff[i];
        else
            row["coeff"] = nullptr;
        j["scan"].push_back(row);
    }
    j["contraction"] = contraction;
    j["iterations"] = final_fp.iterations;
    j["converged"] = final_fp.converged;
    j["weighted_norm"] = final_fp.weighted_norm;
    j["defect"] = final_fp.defect;
    return j.dump(2);
}

StatePair reconstruct_physical(const FrameSeries& psi, const FrameSeries& z,
                               const LinearizedOperator& op,
                               const SimilarityFrame& frame, double t,
                               const RadialGrid& phys_grid) {
    const double tau = frame.tau_of_t(t);
    const double lam = frame.scale(tau);
    const StatePair P = psi.at(tau);
    const StatePair Z = z.at(tau);
    const RadialGrid& xg = op.xi_grid;
    const int d = op.n - 2;
    StatePair phys = StatePair::zero(phys_grid.n_points);
    for (int j = 0; j < phys_grid.n_points; ++j) {
        const double xi = phys_grid.r[j] / lam;
        double pu = 0, ph = 0, zu = 0, zh = 0;
        if (xi <= xg.r_max) {
            pu = interp_even(P.u, xg.h, xi);
            ph = interp_even(P.u_hat, xg.h, xi);
            zu = interp_even(Z.u, xg.h, xi);
            zh = interp_even(Z.u_hat, xg.h, xi);
        }
        phys.u[j] = (phi(xi, d) + pu + zu) / lam;
        phys.u_hat[j] = (phi_hat(xi, d) + ph + zh) / (lam * lam);
    }
    return phys;
}

}  // namespace corowave
