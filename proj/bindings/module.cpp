#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "corowave/config.hpp"
#include "corowave/control.hpp"
#include "corowave/ensemble.hpp"
#include "corowave/lp.hpp"
#include "corowave/version.hpp"

namespace py = pybind11;
using namespace corowave;

PYBIND11_MODULE(corowave_native, m) {
    m.doc() =
        "numerical laboratory for stochastically forced corotational wave maps";
    m.attr("__version__") = kVersion;

    py::class_<RadialGrid>(m, "RadialGrid")
        .def_static("make", &RadialGrid::make, py::arg("r_max"), py::arg("n_points"))
        .def_readonly("r_max", &RadialGrid::r_max)
        .def_readonly("n_points", &RadialGrid::n_points)
        .def_readonly("h", &RadialGrid::h)
        .def_readonly("r", &RadialGrid::r);

    py::class_<StatePair>(m, "StatePair")
        .def(py::init<>())
        .def(py::init<VectorXd, VectorXd>(), py::arg("u"), py::arg("u_hat"))
        .def_static("zero", &StatePair::zero, py::arg("n"))
        .def_readwrite("u", &StatePair::u)
        .def_readwrite("u_hat", &StatePair::u_hat)
        .def("size", &StatePair::size);

    m.def("cell_weights", &cell_weights, py::arg("grid"), py::arg("n"));
    m.def("laplacian_apply",
          py::overload_cast<const RadialGrid&, int, const VectorXd&>(&laplacian_apply),
          py::arg("grid"), py::arg("n"), py::arg("f"));

    py::class_<ProfileParams>(m, "ProfileParams")
        .def(py::init<>())
        .def_readwrite("d", &ProfileParams::d)
        .def_readwrite("T", &ProfileParams::T);
    m.def("phi", &phi, py::arg("rho"), py::arg("d"));
    m.def("phi_hat", &phi_hat, py::arg("rho"), py::arg("d"));
    m.def("u_T_state", &u_T_state, py::arg("t"), py::arg("grid"), py::arg("params"));
    m.def("gauge_state", &gauge_state, py::arg("xi_grid"), py::arg("n"));

    py::class_<ProfileResidual>(m, "ProfileResidual")
        .def_readonly("field", &ProfileResidual::field)
        .def_readonly("max_norm", &ProfileResidual::max_norm)
        .def_readonly("l2w", &ProfileResidual::l2w);
    m.def("profile_residual", &profile_residual, py::arg("grid"), py::arg("d"),
          py::arg("r_lo"), py::arg("r_hi"));

    py::class_<NonlinearityContext>(m, "NonlinearityContext")
        .def(py::init<>())
        .def_readwrite("n", &NonlinearityContext::n)
        .def_readwrite("taylor_threshold", &NonlinearityContext::taylor_threshold);
    m.def("n0_apply", &n0_apply, py::arg("u"), py::arg("grid"), py::arg("ctx"));
    m.def("potential_V", &potential_V, py::arg("xi"), py::arg("n"));
    m.def("energy", &energy, py::arg("state"), py::arg("grid"), py::arg("n"),
          py::arg("geometric") = false);

    py::class_<SobolevOrder>(m, "SobolevOrder")
        .def(py::init<>())
        .def(py::init([](double s, int k) {
                 return SobolevOrder{s, k};
             }),
             py::arg("s"), py::arg("k"))
        .def_readwrite("s", &SobolevOrder::s)
        .def_readwrite("k", &SobolevOrder::k);

    py::class_<SobolevNorm>(m, "SobolevNorm")
        .def_readonly("hs_u", &SobolevNorm::hs_u)
        .def_readonly("hk_u", &SobolevNorm::hk_u)
        .def_readonly("hs_v", &SobolevNorm::hs_v)
        .def_readonly("hk_v", &SobolevNorm::hk_v)
        .def_readonly("total", &SobolevNorm::total);

    py::class_<ModalBasis>(m, "ModalBasis")
        .def_static("build", &ModalBasis::build, py::arg("grid"), py::arg("n"),
                    py::call_guard<py::gil_scoped_release>())
        .def("size", &ModalBasis::size)
        .def("eigenvalues", &ModalBasis::eigenvalues)
        .def("coeffs", &ModalBasis::coeffs, py::arg("f"))
        .def("synth", &ModalBasis::synth, py::arg("a"))
        .def("sobolev", &ModalBasis::sobolev, py::arg("state"), py::arg("order"),
             py::arg("diagnostic") = false)
        .def("checksum", &ModalBasis::checksum);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_static("make", &NoiseModel::make, py::arg("basis"), py::arg("c"),
                    py::arg("beta"), py::arg("modes"), py::keep_alive<0, 1>())
        .def_readonly("c", &NoiseModel::c)
        .def_readonly("beta", &NoiseModel::beta)
        .def_readonly("modes", &NoiseModel::modes)
        .def_readonly("sigma", &NoiseModel::sigma)
        .def("trace_bound", &NoiseModel::trace_bound, py::arg("exponent"));

    py::class_<NoisePath>(m, "NoisePath")
        .def_static("sample", &NoisePath::sample, py::arg("model"), py::arg("dt"),
                    py::arg("t_final"), py::arg("seed"))
        .def_readonly("dt", &NoisePath::dt)
        .def_readonly("steps", &NoisePath::steps)
        .def_readonly("modes", &NoisePath::modes)
        .def_readonly("seed", &NoisePath::seed)
        .def_readonly("incr", &NoisePath::incr);
    m.def("write_noise_dump", &write_noise_dump, py::arg("path"), py::arg("file"));
    m.def("read_noise_dump", &read_noise_dump, py::arg("file"));

    py::class_<ZPath>(m, "ZPath")
        .def_readonly("dt", &ZPath::dt)
        .def_readonly("steps", &ZPath::steps)
        .def_readonly("z", &ZPath::z)
        .def_readonly("zhat", &ZPath::zhat);
    m.def("sample_convolution", &sample_convolution, py::arg("model"), py::arg("dt"),
          py::arg("t_final"), py::arg("seed"));
    m.def("convolution_from_increments", &convolution_from_increments,
          py::arg("model"), py::arg("path"));
    py::class_<ModeVariance>(m, "ModeVariance")
        .def_readonly("var_z", &ModeVariance::var_z)
        .def_readonly("var_zhat", &ModeVariance::var_zhat)
        .def_readonly("cov", &ModeVariance::cov);
    m.def("mode_variance", &mode_variance, py::arg("model"), py::arg("k"), py::arg("t"));
    m.def("evaluate_z", &evaluate_z, py::arg("path"), py::arg("basis"), py::arg("t"));

    py::enum_<SolveMode>(m, "SolveMode")
        .value("direct", SolveMode::direct)
        .value("dpd", SolveMode::dpd);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("n", &SolverConfig::n)
        .def_readwrite("dt_factor", &SolverConfig::dt_factor)
        .def_readwrite("mode", &SolverConfig::mode)
        .def_readwrite("amp_threshold", &SolverConfig::amp_threshold)
        .def_readwrite("norm_threshold", &SolverConfig::norm_threshold)
        .def_readwrite("t_final", &SolverConfig::t_final)
        .def_readwrite("fit_window", &SolverConfig::fit_window)
        .def_readwrite("fit_skip", &SolverConfig::fit_skip)
        .def_readwrite("nonlinearity", &SolverConfig::nonlinearity)
        .def_readwrite("norm_check_stride", &SolverConfig::norm_check_stride)
        .def_readwrite("measure_levels", &SolverConfig::measure_levels)
        .def("dt", &SolverConfig::dt, py::arg("grid"));

    py::class_<BlowupReport>(m, "BlowupReport")
        .def_readonly("blew_up", &BlowupReport::blew_up)
        .def_readonly("t_exit", &BlowupReport::t_exit)
        .def_readonly("T_hat", &BlowupReport::T_hat)
        .def_readonly("fit_ok", &BlowupReport::fit_ok)
        .def_readonly("trigger", &BlowupReport::trigger)
        .def_readonly("sup_amp", &BlowupReport::sup_amp)
        .def_readonly("exit_norm_s", &BlowupReport::exit_norm_s)
        .def_readonly("exit_norm_k", &BlowupReport::exit_norm_k)
        .def_readonly("exit_energy", &BlowupReport::exit_energy)
        .def_readonly("profile_err_final", &BlowupReport::profile_err_final)
        .def_readonly("central_t", &BlowupReport::central_t)
        .def_readonly("central_u", &BlowupReport::central_u)
        .def_readonly("disc_t", &BlowupReport::disc_t)
        .def_readonly("disc_sup", &BlowupReport::disc_sup)
        .def_readonly("disc_sobolev", &BlowupReport::disc_sobolev);

    m.def(
        "solve",
        [](const SolverConfig& cfg, const RadialGrid& grid, const StatePair& initial,
           const ModalBasis* basis, const NoisePath* noise, const ZPath* zpath,
           const SobolevOrder& order) {
            return solve(cfg, grid, initial, basis, noise, zpath, order);
        },
        py::arg("cfg"), py::arg("grid"), py::arg("initial"),
        py::arg("basis").none(true) = nullptr, py::arg("noise").none(true) = nullptr,
        py::arg("zpath").none(true) = nullptr, py::arg("order") = SobolevOrder{},
        py::call_guard<py::gil_scoped_release>());

    py::class_<PicardResult>(m, "PicardResult")
        .def_readonly("end_state", &PicardResult::end_state)
        .def_readonly("contraction", &PicardResult::contraction)
        .def_readonly("iterations", &PicardResult::iterations)
        .def_readonly("converged", &PicardResult::converged);
    m.def(
        "picard_mild_solve",
        [](const StatePair& initial, double t_span, const ModalBasis& basis,
           const NonlinearityContext& ctx, const ZPath* zpath, int iters,
           int quad_points, double tol) {
            return picard_mild_solve(initial, zpath, t_span, iters, basis, ctx,
                                     quad_points, tol);
        },
        py::arg("initial"), py::arg("t_span"), py::arg("basis"), py::arg("ctx"),
        py::arg("zpath").none(true) = nullptr, py::arg("iterations") = 20,
        py::arg("quad_points") = 64, py::arg("tol") = 1e-12,
        py::call_guard<py::gil_scoped_release>());

    py::class_<SimilarityFrame>(m, "SimilarityFrame")
        .def(py::init([](double T_tilde) { return SimilarityFrame{T_tilde}; }),
             py::arg("T_tilde"))
        .def_readwrite("T_tilde", &SimilarityFrame::T_tilde)
        .def("tau_of_t", &SimilarityFrame::tau_of_t)
        .def("t_of_tau", &SimilarityFrame::t_of_tau)
        .def("scale", &SimilarityFrame::scale);
    m.def("to_similarity", &to_similarity, py::arg("phys"), py::arg("phys_grid"),
          py::arg("t"), py::arg("T_tilde"), py::arg("xi_grid"));
    m.def("from_similarity", &from_similarity, py::arg("sim"), py::arg("xi_grid"),
          py::arg("tau"), py::arg("frame"), py::arg("phys_grid"));

    py::class_<SpectrumResult>(m, "SpectrumResult")
        .def_readonly("eigenvalues", &SpectrumResult::eigenvalues)
        .def_readonly("gauge_eigenvalue_residual",
                      &SpectrumResult::gauge_eigenvalue_residual);
    m.def("spectrum", &spectrum, py::arg("xi_grid"), py::arg("n"), py::arg("count"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<SimTrajectory>(m, "SimTrajectory")
        .def_readonly("taus", &SimTrajectory::taus)
        .def_readonly("frames", &SimTrajectory::frames)
        .def_readonly("final", &SimTrajectory::final)
        .def_readonly("dtau", &SimTrajectory::dtau);
    m.def(
        "evolve_similarity",
        [](const StatePair& initial, const RadialGrid& xi_grid, int n,
           double tau_span, const std::string& mode, double cfl,
           double frame_stride) {
            SimEvolveOptions opt;
            if (mode == "full")
                opt.mode = SimRhsMode::full;
            else if (mode == "linearized")
                opt.mode = SimRhsMode::linearized;
            else
                throw std::invalid_argument("mode must be full or linearized");
            opt.cfl = cfl;
            opt.frame_stride = frame_stride;
            return evolve_similarity(initial, xi_grid, n, tau_span, opt);
        },
        py::arg("initial"), py::arg("xi_grid"), py::arg("n"), py::arg("tau_span"),
        py::arg("mode") = "full", py::arg("cfl") = 0.8, py::arg("frame_stride") = 0.0,
        py::call_guard<py::gil_scoped_release>());

    py::class_<LinearizedOperator>(m, "LinearizedOperator")
        .def_readonly("xi_grid", &LinearizedOperator::xi_grid)
        .def_readonly("n", &LinearizedOperator::n)
        .def_readonly("gauge", &LinearizedOperator::gauge)
        .def_readonly("cogauge", &LinearizedOperator::cogauge)
        .def_readonly("w", &LinearizedOperator::w)
        .def("pairing", &LinearizedOperator::pairing, py::arg("f"))
        .def("project", &LinearizedOperator::project, py::arg("f"))
        .def("project_out", &LinearizedOperator::project_out, py::arg("f"))
        .def("gauge_residual", &LinearizedOperator::gauge_residual)
        .def("projector_defect", &LinearizedOperator::projector_defect);
    m.def("build_linearized_operator", &build_linearized_operator, py::arg("xi_grid"),
          py::arg("n"), py::call_guard<py::gil_scoped_release>());

    py::class_<LPConfig>(m, "LPConfig")
        .def(py::init<>())
        .def_readwrite("delta", &LPConfig::delta)
        .def_readwrite("big_C", &LPConfig::big_C)
        .def_readwrite("N_div", &LPConfig::N_div)
        .def_readwrite("omega_bar", &LPConfig::omega_bar)
        .def_readwrite("tau_max", &LPConfig::tau_max)
        .def_readwrite("picard_tol", &LPConfig::picard_tol)
        .def_readwrite("picard_max_iter", &LPConfig::picard_max_iter)
        .def_readwrite("coeff_tol", &LPConfig::coeff_tol)
        .def_readwrite("quad_stride", &LPConfig::quad_stride)
        .def_readwrite("cfl", &LPConfig::cfl);

    py::class_<FrameSeries>(m, "FrameSeries")
        .def_readonly("stride", &FrameSeries::stride)
        .def_readonly("frames", &FrameSeries::frames)
        .def("count", &FrameSeries::count)
        .def("horizon", &FrameSeries::horizon)
        .def("at", &FrameSeries::at, py::arg("tau"));

    py::class_<FixedPointResult>(m, "FixedPointResult")
        .def_readonly("psi", &FixedPointResult::psi)
        .def_readonly("contraction", &FixedPointResult::contraction)
        .def_readonly("weighted_norm", &FixedPointResult::weighted_norm)
        .def_readonly("defect", &FixedPointResult::defect)
        .def_readonly("corrector_coeff", &FixedPointResult::corrector_coeff)
        .def_readonly("tail_bound", &FixedPointResult::tail_bound)
        .def_readonly("iterations", &FixedPointResult::iterations)
        .def_readonly("converged", &FixedPointResult::converged);

    py::class_<TTildeResult>(m, "TTildeResult")
        .def_readonly("T_tilde", &TTildeResult::T_tilde)
        .def_readonly("bracket_found", &TTildeResult::bracket_found)
        .def_readonly("scan_T", &TTildeResult::scan_T)
        .def_readonly("scan_coeff", &TTildeResult::scan_coeff)
        .def_readonly("contraction", &TTildeResult::contraction)
        .def_readonly("tail_bound", &TTildeResult::tail_bound)
        .def_readonly("final_coeff", &TTildeResult::final_coeff)
        .def_readonly("evaluations", &TTildeResult::evaluations)
        .def_readonly("final_fp", &TTildeResult::final_fp)
        .def("diagnostics_json", &TTildeResult::diagnostics_json);

    m.def("initial_perturbation", &initial_perturbation, py::arg("u0"),
          py::arg("phys_grid"), py::arg("T_tilde"), py::arg("T"), py::arg("xi_grid"),
          py::arg("d"));
    m.def("lp_fixed_point", &lp_fixed_point, py::arg("v"), py::arg("z"), py::arg("op"),
          py::arg("cfg"), py::arg("ctx"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "find_T_tilde",
        [](const StatePair& u0, const RadialGrid& phys_grid, double T,
           const LinearizedOperator& op, const LPConfig& cfg,
           const NonlinearityContext& ctx, const ZPath* zpath,
           const ModalBasis* basis) {
            return find_T_tilde(u0, phys_grid, zpath, basis, T, op, cfg, ctx);
        },
        py::arg("u0"), py::arg("phys_grid"), py::arg("T"), py::arg("op"),
        py::arg("cfg"), py::arg("ctx"), py::arg("zpath").none(true) = nullptr,
        py::arg("basis").none(true) = nullptr,
        py::call_guard<py::gil_scoped_release>());

    py::class_<SteeringProblem>(m, "SteeringProblem")
        .def(py::init<>())
        .def_readwrite("u0", &SteeringProblem::u0)
        .def_readwrite("u1", &SteeringProblem::u1)
        .def_readwrite("T1", &SteeringProblem::T1);
    py::class_<SteeringTrajectory>(m, "SteeringTrajectory")
        .def_readonly("dt", &SteeringTrajectory::dt)
        .def_readonly("t", &SteeringTrajectory::t)
        .def_readonly("u", &SteeringTrajectory::u)
        .def_readonly("u_hat", &SteeringTrajectory::u_hat);
    m.def("steering_state", &steering_state, py::arg("problem"), py::arg("basis"),
          py::arg("steps"));
    m.def("forcing_from_state", &forcing_from_state, py::arg("traj"), py::arg("basis"),
          py::arg("ctx"));
    m.def("z_from_forcing", &z_from_forcing, py::arg("f"), py::arg("f_dt"),
          py::arg("basis"), py::arg("dt_out"), py::arg("t_end"));
    py::class_<ContinuityRow>(m, "ContinuityRow")
        .def_readonly("which", &ContinuityRow::which)
        .def_readonly("size", &ContinuityRow::size)
        .def_readonly("endpoint_shift", &ContinuityRow::endpoint_shift);
    py::class_<SteeringReport>(m, "SteeringReport")
        .def_readonly("endpoint_sup", &SteeringReport::endpoint_sup)
        .def_readonly("endpoint_sobolev", &SteeringReport::endpoint_sobolev)
        .def_readonly("solver_diverged", &SteeringReport::solver_diverged)
        .def_readonly("continuity", &SteeringReport::continuity);
    m.def("verify_steering", &verify_steering, py::arg("problem"), py::arg("grid"),
          py::arg("basis"), py::arg("solver_cfg"), py::arg("order"),
          py::arg("with_continuity") = true, py::arg("trajectory_steps") = 256,
          py::arg("continuity_sizes") = std::vector<double>{1e-2, 1e-3, 1e-4},
          py::call_guard<py::gil_scoped_release>());

    py::enum_<InitialData>(m, "InitialData")
        .value("zero", InitialData::zero)
        .value("self_similar", InitialData::self_similar)
        .value("self_similar_perturbed", InitialData::self_similar_perturbed)
        .value("custom", InitialData::custom);
    py::class_<EnsembleConfig>(m, "EnsembleConfig")
        .def(py::init<>())
        .def_readwrite("base", &EnsembleConfig::base)
        .def_readwrite("paths", &EnsembleConfig::paths)
        .def_readwrite("run_seed", &EnsembleConfig::run_seed)
        .def_readwrite("horizon", &EnsembleConfig::horizon)
        .def_readwrite("data", &EnsembleConfig::data)
        .def_readwrite("data_T", &EnsembleConfig::data_T)
        .def_readwrite("data_eps", &EnsembleConfig::data_eps)
        .def_readwrite("data_shape_width", &EnsembleConfig::data_shape_width)
        .def_readwrite("data_file", &EnsembleConfig::data_file)
        .def_readwrite("workers", &EnsembleConfig::workers);
    py::class_<WilsonInterval>(m, "WilsonInterval")
        .def_readonly("lo", &WilsonInterval::lo)
        .def_readonly("hi", &WilsonInterval::hi);
    m.def("wilson_interval", &wilson_interval, py::arg("successes"), py::arg("trials"),
          py::arg("z") = 1.959963984540054);
    py::class_<PathRecord>(m, "PathRecord")
        .def_readonly("path_id", &PathRecord::path_id)
        .def_readonly("seed", &PathRecord::seed)
        .def_readonly("outcome", &PathRecord::outcome)
        .def_readonly("t_exit", &PathRecord::t_exit)
        .def_readonly("T_hat", &PathRecord::T_hat)
        .def_readonly("profile_err_final", &PathRecord::profile_err_final)
        .def_readonly("sup_amp", &PathRecord::sup_amp)
        .def_readonly("exit_norm_s", &PathRecord::exit_norm_s)
        .def_readonly("exit_norm_k", &PathRecord::exit_norm_k)
        .def_readonly("wall_ms", &PathRecord::wall_ms);
    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("records", &EnsembleStats::records)
        .def_readonly("blowups", &EnsembleStats::blowups)
        .def_readonly("globals", &EnsembleStats::globals)
        .def_readonly("errors", &EnsembleStats::errors)
        .def_readonly("fraction", &EnsembleStats::fraction)
        .def_readonly("wilson", &EnsembleStats::wilson)
        .def_readonly("T_hat_values", &EnsembleStats::T_hat_values)
        .def_readonly("T_hat_mean", &EnsembleStats::T_hat_mean)
        .def_readonly("disc_final_mean", &EnsembleStats::disc_final_mean)
        .def_readonly("wall_ms_total", &EnsembleStats::wall_ms_total);
    m.def("make_initial_data", &make_initial_data, py::arg("cfg"), py::arg("grid"),
          py::arg("d"));
    m.def("run_ensemble", &run_ensemble, py::arg("cfg"), py::arg("grid"),
          py::arg("basis"), py::arg("model"), py::arg("order"),
          py::arg("records_csv") = "", py::arg("manifest_json") = "",
          py::arg("config_echo") = "", py::call_guard<py::gil_scoped_release>());
    m.def("amplitude_sweep", &amplitude_sweep, py::arg("cfg"), py::arg("grid"),
          py::arg("basis"), py::arg("base_model"), py::arg("order"),
          py::arg("c_values"), py::call_guard<py::gil_scoped_release>());
    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("c", &SweepRow::c)
        .def_readonly("paths", &SweepRow::paths)
        .def_readonly("blowups", &SweepRow::blowups)
        .def_readonly("fraction", &SweepRow::fraction)
        .def_readonly("wilson", &SweepRow::wilson);
    py::class_<TriggerSearch>(m, "TriggerSearch")
        .def_readonly("found", &TriggerSearch::found)
        .def_readonly("c_star", &TriggerSearch::c_star)
        .def_readonly("rows", &TriggerSearch::rows);
    m.def("find_trigger_amplitude", &find_trigger_amplitude, py::arg("cfg"),
          py::arg("grid"), py::arg("basis"), py::arg("base_model"), py::arg("order"),
          py::arg("c0"), py::arg("max_doublings"),
          py::call_guard<py::gil_scoped_release>());
}
