#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corowave/solver.hpp"

namespace corowave {

enum class InitialData { zero, self_similar, self_similar_perturbed, custom };

struct EnsembleConfig {
    SolverConfig base;
    int paths = 200;
    uint64_t run_seed = 12345;
    double horizon = 2.0;  // blowup counted only when t_exit < horizon
    InitialData data = InitialData::zero;
    double data_T = 1.0;
    double data_eps = 1e-3;
    double data_shape_width = 0.5;  // Gaussian bump width of the perturbation
    std::string data_file;
    int workers = 0;  // 0: hardware concurrency

    void validate() const;
};

struct PathRecord {
    int path_id = 0;
    uint64_t seed = 0;
    std::string outcome;  // blowup | global | error
    double t_exit = 0;
    double T_hat = 0;
    double profile_err_final = 0;
    double sup_amp = 0;
    double exit_norm_s = 0;
    double exit_norm_k = 0;
    double wall_ms = 0;
    std::vector<double> disc_sup;
};

struct WilsonInterval {
    double lo = 0, hi = 0;
};
WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct EnsembleStats {
    std::vector<PathRecord> records;
    int blowups = 0;
    int globals = 0;
    int errors = 0;
    double fraction = 0;
    WilsonInterval wilson;
    std::vector<double> T_hat_values;
    double T_hat_mean = 0;
    double disc_final_mean = 0;  // mean last-measurement discrepancy on blowup paths
    double wall_ms_total = 0;
};

StatePair make_initial_data(const EnsembleConfig& cfg, const RadialGrid& grid, int d);

// Work-stealing over path indices; per-path seed = hash(run_seed, index);
// records streamed to the CSV in path order as they complete (reorder buffer).
// records_csv/manifest_json may be empty to skip writing.
EnsembleStats run_ensemble(const EnsembleConfig& cfg, const RadialGrid& grid,
                           const ModalBasis& basis, const NoiseModel& model,
                           const SobolevOrder& order,
                           const std::string& records_csv = "",
                           const std::string& manifest_json = "",
                           const std::string& config_echo = "");

struct SweepRow {
    double c = 0;
    int paths = 0;
    int blowups = 0;
    double fraction = 0;
    WilsonInterval wilson;
};

std::vector<SweepRow> amplitude_sweep(const EnsembleConfig& cfg,
                                      const RadialGrid& grid,
                                      const ModalBasis& basis,
                                      const NoiseModel& base_model,
                                      const SobolevOrder& order,
                                      const std::vector<double>& c_values);

// Doubling search for an amplitude with a strictly positive Wilson lower
// bound; returns the sweep rows visited. found=false when the cap is reached.
struct TriggerSearch {
    bool found = false;
    double c_star = 0;
    std::vector<SweepRow> rows;
};
TriggerSearch find_trigger_amplitude(const EnsembleConfig& cfg,
                                     const RadialGrid& grid,
                                     const ModalBasis& basis,
                                     const NoiseModel& base_model,
                                     const SobolevOrder& order, double c0,
                                     int max_doublings);

}  // namespace corowave
