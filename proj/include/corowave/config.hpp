#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace corowave {

// Flat "section.key = value" document; '#' comments; unknown keys rejected.
struct RunConfig {
    // model
    int d = 3;
    double s = 1.6;
    int k = 6;
    // grid
    double r_max = 8.0;
    int n_points = 1024;
    double dt_factor = 0.45;
    // noise
    double noise_c = 0.05;
    double noise_beta = 11.0;
    int noise_modes = 64;
    // run
    double t_final = 2.0;
    double horizon = 2.0;
    int paths = 200;
    uint64_t seed = 12345;
    std::string data = "self_similar";  // zero | self_similar | self_similar_perturbed | file:PATH
    double data_T = 1.0;
    double data_eps = 1e-3;
    double data_shape_width = 0.5;
    double snapshot_stride = 0.1;
    int workers = 0;
    // detect
    double amp_threshold = 200.0;
    int fit_window = 50;
    // lp
    double lp_delta = 0.2;
    double lp_big_C = 10.0;
    double lp_N = 2.0;
    double lp_omega_bar = 0.05;
    double lp_tau_max = 60.0;
    double lp_picard_tol = 1e-8;
    // control
    double T1 = 1.0;

    int n() const { return d + 2; }
    void validate() const;  // throws std::invalid_argument with the offending key
    std::string echo() const;
};

// Parse a config file (empty path: defaults) then apply "key=value" overrides
// (flags win). Throws std::invalid_argument for unknown keys or bad values.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides);

}  // namespace corowave
