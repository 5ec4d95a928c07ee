#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corowave/config.hpp"
#include "corowave/control.hpp"
#include "corowave/ensemble.hpp"
#include "corowave/lp.hpp"
#include "corowave/version.hpp"

using namespace corowave;
using nlohmann::json;

namespace {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shared solver/ensemble assembly from the declarative config
EnsembleConfig ensemble_of(const RunConfig& c) {
    EnsembleConfig e;
    e.base.n = c.n();
    e.base.dt_factor = c.dt_factor;
    e.base.amp_threshold = c.amp_threshold;
    e.base.fit_window = c.fit_window;
    e.base.t_final = c.t_final;
    e.paths = c.paths;
    e.run_seed = c.seed;
    e.horizon = c.horizon;
    e.data_T = c.data_T;
    e.data_eps = c.data_eps;
    e.data_shape_width = c.data_shape_width;
    e.workers = c.workers;
    if (c.data == "zero") {
        e.data = InitialData::zero;
    } else if (c.data == "self_similar") {
        e.data = InitialData::self_similar;
    } else if (c.data == "self_similar_perturbed") {
        e.data = InitialData::self_similar_perturbed;
    } else {
        e.data = InitialData::custom;
        e.data_file = c.data.substr(5);  // "file:PATH"
    }
    return e;
}

StatePair read_pair_file(const std::string& path, const RadialGrid& grid) {
    EnsembleConfig shim;
    shim.data = InitialData::custom;
    shim.data_file = path;
    return make_initial_data(shim, grid, 3);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open output file " + path);
    out << text;
    if (!out) throw io_error("write failed for " + path);
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
}

int cmd_profile_check(const RunConfig& cfg, const std::string& out_path) {
    const RadialGrid grid = RadialGrid::make(cfg.r_max, cfg.n_points);
    const ProfileResidual res =
        profile_residual(grid, cfg.d, 0.0, std::min(5.0, cfg.r_max));
    const RadialGrid xi = RadialGrid::make(std::min(cfg.r_max, 8.0), cfg.n_points);
    const LinearizedOperator op = build_linearized_operator(xi, cfg.n());

    const double profile_threshold = 1e-3;
    const double gauge_threshold = 1e-3;
    const bool pass = res.max_norm <= profile_threshold &&
                      op.gauge_residual() <= gauge_threshold;
    json j;
    j["grid"] = {{"r_max", grid.r_max}, {"n_points", grid.n_points}, {"h", grid.h}};
    j["profile_residual_max"] = res.max_norm;
    j["profile_residual_l2w"] = res.l2w;
    j["profile_threshold"] = profile_threshold;
    j["gauge_residual"] = op.gauge_residual();
    j["gauge_threshold"] = gauge_threshold;
    j["projector_defect"] = op.projector_defect();
    j["pass"] = pass;
    emit(j, out_path);
    return pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir,
                 const std::string& noise_dump) {
    const RadialGrid grid = RadialGrid::make(cfg.r_max, cfg.n_points);
    const ModalBasis basis = ModalBasis::build(grid, cfg.n());
    const EnsembleConfig ens = ensemble_of(cfg);
    const StatePair initial = make_initial_data(ens, grid, cfg.d);
    const SobolevOrder order{cfg.s, cfg.k};

    NoisePath noise;
    const bool with_noise = cfg.noise_c > 0;
    if (with_noise) {
        const NoiseModel model =
            NoiseModel::make(basis, cfg.noise_c, cfg.noise_beta, cfg.noise_modes);
        noise = NoisePath::sample(model, ens.base.dt(grid), cfg.t_final, cfg.seed);
        if (!noise_dump.empty()) write_noise_dump(noise, noise_dump);
    }

    std::ofstream traj(out_dir + "/trajectory.csv");
    if (!traj) throw io_error("cannot open output file " + out_dir + "/trajectory.csv");
    traj << std::setprecision(17) << "t";
    for (int jx = 0; jx < grid.n_points; ++jx) traj << ",u_" << jx;
    for (int jx = 0; jx < grid.n_points; ++jx) traj << ",uhat_" << jx;
    traj << '\n';
    TrajectoryRecorder rec;
    rec.stride = cfg.snapshot_stride;
    rec.sink = [&](double t, const StatePair& s) {
        traj << t;
        for (int jx = 0; jx < grid.n_points; ++jx) traj << ',' << s.u[jx];
        for (int jx = 0; jx < grid.n_points; ++jx) traj << ',' << s.u_hat[jx];
        traj << '\n';
    };

    const BlowupReport rep =
        solve(ens.base, grid, initial, &basis, with_noise ? &noise : nullptr,
              nullptr, order, cfg.snapshot_stride > 0 ? &rec : nullptr);
    traj.close();

    json j;
    j["version"] = kVersion;
    j["blew_up"] = rep.blew_up;
    j["t_exit"] = rep.t_exit;
    j["T_hat"] = rep.T_hat;
    j["fit_ok"] = rep.fit_ok;
    j["fit_monotone"] = rep.fit_monotone;
    j["fit_drift"] = rep.fit_drift;
    j["trigger"] = rep.trigger;
    j["sup_amp"] = rep.sup_amp;
    j["exit_norm_s"] = rep.exit_norm_s;
    j["exit_norm_k"] = rep.exit_norm_k;
    j["exit_energy"] = rep.exit_energy;
    j["profile_err_final"] = rep.profile_err_final;
    j["disc_t"] = rep.disc_t;
    j["disc_sup"] = rep.disc_sup;
    j["disc_sobolev"] = rep.disc_sobolev;
    j["central_t"] = rep.central_t;
    j["central_u"] = rep.central_u;
    write_text(out_dir + "/report.json", j.dump(2) + "\n");
    std::cout << (rep.blew_up ? "blowup" : "global") << " t_exit=" << rep.t_exit
              << " T_hat=" << rep.T_hat << "\n";
    return 0;
}

double parse_sweep_value(const std::string& tok) {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size())
        throw std::invalid_argument("bad sweep value: " + tok);
    return v;
}

int cmd_ensemble(const RunConfig& cfg, const std::string& records,
                 const std::string& manifest, const std::string& sweep,
                 double trigger_c0, int max_doublings) {
    const RadialGrid grid = RadialGrid::make(cfg.r_max, cfg.n_points);
    const ModalBasis basis = ModalBasis::build(grid, cfg.n());
    const NoiseModel model =
        NoiseModel::make(basis, cfg.noise_c, cfg.noise_beta, cfg.noise_modes);
    const EnsembleConfig ens = ensemble_of(cfg);
    const SobolevOrder order{cfg.s, cfg.k};

    if (!sweep.empty()) {
        std::vector<double> cs;
        std::stringstream ss(sweep);
        std::string tok;
        while (std::getline(ss, tok, ','))
            cs.push_back(parse_sweep_value(tok));
        const std::vector<SweepRow> rows =
            amplitude_sweep(ens, grid, basis, model, order, cs);
        json j = json::array();
        for (const SweepRow& r : rows)
            j.push_back({{"c", r.c},
                         {"paths", r.paths},
                         {"blowups", r.blowups},
                         {"fraction", r.fraction},
                         {"wilson_lo", r.wilson.lo},
                         {"wilson_hi", r.wilson.hi}});
        emit(j, "");
        return 0;
    }
    if (trigger_c0 > 0) {
        const TriggerSearch ts = find_trigger_amplitude(ens, grid, basis, model,
                                                        order, trigger_c0,
                                                        max_doublings);
        json j;
        j["found"] = ts.found;
        j["c_star"] = ts.c_star;
        j["rows"] = json::array();
        for (const SweepRow& r : ts.rows)
            j["rows"].push_back({{"c", r.c},
                                 {"blowups", r.blowups},
                                 {"fraction", r.fraction},
                                 {"wilson_lo", r.wilson.lo}});
        emit(j, "");
        return ts.found ? 0 : 1;
    }

    const EnsembleStats stats =
        run_ensemble(ens, grid, basis, model, order, records, manifest, cfg.echo());
    json j;
    j["paths"] = ens.paths;
    j["blowups"] = stats.blowups;
    j["globals"] = stats.globals;
    j["errors"] = stats.errors;
    j["fraction"] = stats.fraction;
    j["wilson_lo"] = stats.wilson.lo;
    j["wilson_hi"] = stats.wilson.hi;
    j["T_hat_mean"] = stats.T_hat_mean;
    j["disc_final_mean"] = stats.disc_final_mean;
    j["wall_ms_total"] = stats.wall_ms_total;
    j["records"] = records;
    j["manifest"] = manifest;
    emit(j, "");
    return 0;
}

int cmd_lp_solve(const RunConfig& cfg, const std::string& data_file,
                 const std::string& noise_dump, const std::string& out_path) {
    const RadialGrid xi = RadialGrid::make(8.0, 256);
    const LinearizedOperator op = build_linearized_operator(xi, cfg.n());
    const RadialGrid phys = RadialGrid::make(cfg.r_max, cfg.n_points);

    StatePair u0;
    if (!data_file.empty())
        u0 = read_pair_file(data_file, phys);
    else
        u0 = u_T_state(0.0, phys, ProfileParams{cfg.d, cfg.data_T});

    LPConfig lp;
    lp.delta = cfg.lp_delta;
    lp.big_C = cfg.lp_big_C;
    lp.N_div = cfg.lp_N;
    lp.omega_bar = cfg.lp_omega_bar;
    lp.tau_max = cfg.lp_tau_max;
    lp.picard_tol = cfg.lp_picard_tol;

    NonlinearityContext ctx;
    ctx.n = cfg.n();

    TTildeResult res;
    if (!noise_dump.empty()) {
        const ModalBasis basis = ModalBasis::build(phys, cfg.n());
        const NoiseModel model =
            NoiseModel::make(basis, cfg.noise_c, cfg.noise_beta, cfg.noise_modes);
        const NoisePath path = read_noise_dump(noise_dump);
        const ZPath zp = convolution_from_increments(model, path);
        res = find_T_tilde(u0, phys, &zp, &basis, cfg.data_T, op, lp, ctx);
    } else {
        res = find_T_tilde(u0, phys, nullptr, nullptr, cfg.data_T, op, lp, ctx);
    }
    if (out_path.empty())
        std::cout << res.diagnostics_json() << "\n";
    else
        write_text(out_path, res.diagnostics_json() + "\n");
    return 0;
}

int cmd_steer(const RunConfig& cfg, const std::string& source_file,
              const std::string& target_file, const std::string& out_path) {
    const RadialGrid grid = RadialGrid::make(cfg.r_max, cfg.n_points);
    const ModalBasis basis = ModalBasis::build(grid, cfg.n());
    const SobolevOrder order{cfg.s, cfg.k};

    SteeringProblem prob;
    prob.T1 = cfg.T1;
    if (!source_file.empty()) {
        prob.u0 = read_pair_file(source_file, grid);
    } else {
        prob.u0 = StatePair::zero(grid.n_points);
    }
    if (!target_file.empty()) {
        prob.u1 = read_pair_file(target_file, grid);
    } else {
        // smooth default target: Gaussian bump of amplitude 0.1
        prob.u1 = StatePair::zero(grid.n_points);
        for (int j = 0; j < grid.n_points; ++j) {
            const double x = (grid.r[j] - 1.0) / 0.3;
            prob.u1.u[j] = 0.1 * std::exp(-x * x);
        }
    }

    const EnsembleConfig ens = ensemble_of(cfg);
    const SteeringReport rep =
        verify_steering(prob, grid, basis, ens.base, order, true, 256);

    json j;
    j["endpoint_sup"] = rep.endpoint_sup;
    j["endpoint_sobolev"] = rep.endpoint_sobolev;
    j["solver_diverged"] = rep.solver_diverged;
    j["continuity"] = json::array();
    for (const ContinuityRow& r : rep.continuity)
        j["continuity"].push_back(
            {{"which", r.which}, {"size", r.size}, {"shift", r.endpoint_shift}});
    emit(j, out_path);
    return rep.solver_diverged ? 1 : 0;
}

int cmd_spectrum(const RunConfig& cfg, int count, const std::string& out_path) {
    const RadialGrid xi = RadialGrid::make(8.0, 256);
    const SpectrumResult spec = spectrum(xi, cfg.n(), count);
    const bool pass = spec.gauge_eigenvalue_residual <= 1e-3;
    json j;
    j["count"] = count;
    j["gauge_eigenvalue_residual"] = spec.gauge_eigenvalue_residual;
    j["pass"] = pass;
    j["eigenvalues"] = json::array();
    for (const auto& ev : spec.eigenvalues)
        j["eigenvalues"].push_back({{"re", ev.real()}, {"im", ev.imag()}});
    emit(j, out_path);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "corowave: numerical laboratory for stochastically forced corotational "
        "wave maps (radial reduction, self-similar blowup, blowup-time "
        "selection, controllability, Monte Carlo ensembles)"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (section.key = value lines)");
    app.add_option("--set", overrides,
                   "override, e.g. --set grid.n_points=512 (flags win over file)");
    app.footer(
        "config keys (units in brackets):\n"
        "  model.d            target-sphere dimension, ambient n = d+2 [-]\n"
        "  model.s, model.k   Sobolev orders, n/2-1 < s < n/2-1+1/(2n-4), k > n [-]\n"
        "  grid.r_max         physical domain radius [length]\n"
        "  grid.n_points      radial cells [-]\n"
        "  grid.dt_factor     dt = dt_factor * h [-]\n"
        "  noise.c            noise amplitude [field/time^{1/2}]\n"
        "  noise.beta         modal decay exponent sigma_k = c(1+lambda_k)^{-beta/2} [-]\n"
        "  noise.modes        forced modes [-]\n"
        "  run.t_final        integration span [time]\n"
        "  run.horizon        blowup-counting horizon, <= t_final [time]\n"
        "  run.paths          Monte Carlo paths [-]\n"
        "  run.seed           base seed; per-path seeds derived [-]\n"
        "  run.data           zero | self_similar | self_similar_perturbed | file:PATH\n"
        "  run.data_T         blowup time of the self-similar data [time]\n"
        "  run.data_eps       perturbation amplitude [field]\n"
        "  run.data_shape_width  Gaussian perturbation width [length]\n"
        "  run.snapshot_stride   trajectory snapshot spacing, 0 = off [time]\n"
        "  run.workers        threads, 0 = hardware [-]\n"
        "  detect.amp_threshold  sup|u| blowup trigger [field]\n"
        "  detect.fit_window  trailing samples in the blowup-time fit [-]\n"
        "  lp.delta           fixed-point ball radius [-]\n"
        "  lp.big_C           data-smallness divisor [-]\n"
        "  lp.N               bracket half-width divisor: T +- delta/N [-]\n"
        "  lp.omega_bar       decay weight of the contraction metric [1/time]\n"
        "  lp.tau_max         similarity-time horizon [time]\n"
        "  lp.picard_tol      fixed-point stopping tolerance [-]\n"
        "  control.T1         steering horizon [time]\n"
        "exit codes: 0 success, 1 assertion/threshold failure, 2 usage, 3 IO");

    int rc = 0;

    auto* p_check = app.add_subcommand("profile-check",
                                       "static profile and gauge-pair residuals");
    std::string pc_out;
    p_check->add_option("--out", pc_out, "write the JSON report here instead of stdout");

    auto* p_sim = app.add_subcommand("simulate", "one path with full snapshots");
    std::string sim_out = ".", sim_dump;
    p_sim->add_option("--out", sim_out, "output directory for trajectory.csv/report.json");
    p_sim->add_option("--dump-noise", sim_dump, "write the sampled noise path (CBLZ1)");
    std::string sim_data;
    p_sim->add_option("--data", sim_data, "override run.data selector");
    uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    p_sim->add_option("--seed", sim_seed, "override run.seed")
        ->each([&](const std::string&) { sim_seed_set = true; });

    auto* p_ens = app.add_subcommand("ensemble", "Monte Carlo blowup-fraction runs");
    std::string ens_records = "ensemble_records.csv";
    std::string ens_manifest = "ensemble_manifest.json";
    std::string ens_sweep;
    double ens_trigger_c0 = 0;
    int ens_max_doublings = 40;
    p_ens->add_option("--records", ens_records, "per-path records CSV");
    p_ens->add_option("--manifest", ens_manifest, "run manifest JSON");
    p_ens->add_option("--sweep", ens_sweep, "comma-separated noise amplitudes");
    p_ens->add_option("--find-trigger", ens_trigger_c0,
                      "double the amplitude from here until blowup has a positive "
                      "Wilson lower bound");
    p_ens->add_option("--max-doublings", ens_max_doublings, "doubling-search cap");

    auto* p_lp = app.add_subcommand("lp-solve",
                                    "blowup-time selection by corrector root-finding");
    std::string lp_data, lp_noise, lp_out;
    p_lp->add_option("--data", lp_data, "initial pair CSV (default: exact self-similar)");
    p_lp->add_option("--noise-dump", lp_noise, "CBLZ1 noise path for the forced problem");
    p_lp->add_option("--out", lp_out, "write diagnostics JSON here instead of stdout");

    auto* p_steer = app.add_subcommand("steer",
                                       "endpoint steering with forcing reconstruction");
    std::string steer_source, steer_target, steer_out;
    p_steer->add_option("--source", steer_source, "initial pair CSV (default: zero)");
    p_steer->add_option("--target", steer_target,
                        "target pair CSV (default: 0.1-amplitude Gaussian bump)");
    p_steer->add_option("--out", steer_out, "write the JSON report here instead of stdout");

    auto* p_spec = app.add_subcommand("spectrum", "linearized-generator eigenvalues");
    int spec_count = 12;
    std::string spec_out;
    p_spec->add_option("--count", spec_count, "eigenvalues to report");
    p_spec->add_option("--out", spec_out, "write the JSON report here instead of stdout");

    p_check->callback([&]() {
        rc = cmd_profile_check(load_config(config_path, overrides), pc_out);
    });
    p_sim->callback([&]() {
        RunConfig cfg = load_config(config_path, overrides);
        if (!sim_data.empty()) {
            cfg.data = sim_data;
            cfg.validate();
        }
        if (sim_seed_set) cfg.seed = sim_seed;
        rc = cmd_simulate(cfg, sim_out, sim_dump);
    });
    p_ens->callback([&]() {
        rc = cmd_ensemble(load_config(config_path, overrides), ens_records,
                          ens_manifest, ens_sweep, ens_trigger_c0,
                          ens_max_doublings);
    });
    p_lp->callback([&]() {
        rc = cmd_lp_solve(load_config(config_path, overrides), lp_data, lp_noise,
                          lp_out);
    });
    p_steer->callback([&]() {
        rc = cmd_steer(load_config(config_path, overrides), steer_source,
                       steer_target, steer_out);
    });
    p_spec->callback([&]() {
        rc = cmd_spectrum(load_config(config_path, overrides), spec_count, spec_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        return (msg.find("open") != std::string::npos ||
                msg.find("file") != std::string::npos)
                   ? 3
                   : 1;
    }
    return rc;
}
