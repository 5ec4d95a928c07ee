#include "corowave/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "corowave/modal.hpp"

namespace corowave {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + v);
    }
    if (pos != v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long long x;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + v);
    }
    if (pos != v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return static_cast<int>(x);
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    size_t pos = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + v);
    }
    if (pos != v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return static_cast<uint64_t>(x);
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> table = {
        {"model.d", [](RunConfig& c, const std::string& k, const std::string& v) { c.d = parse_int(k, v); }},
        {"model.s", [](RunConfig& c, const std::string& k, const std::string& v) { c.s = parse_double(k, v); }},
        {"model.k", [](RunConfig& c, const std::string& k, const std::string& v) { c.k = parse_int(k, v); }},
        {"grid.r_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.r_max = parse_double(k, v); }},
        {"grid.n_points", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_points = parse_int(k, v); }},
        {"grid.dt_factor", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt_factor = parse_double(k, v); }},
        {"noise.c", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_c = parse_double(k, v); }},
        {"noise.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_beta = parse_double(k, v); }},
        {"noise.modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_modes = parse_int(k, v); }},
        {"run.t_final", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_final = parse_double(k, v); }},
        {"run.horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.horizon = parse_double(k, v); }},
        {"run.paths", [](RunConfig& c, const std::string& k, const std::string& v) { c.paths = parse_int(k, v); }},
        {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); }},
        {"run.data", [](RunConfig& c, const std::string&, const std::string& v) { c.data = v; }},
        {"run.data_T", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_T = parse_double(k, v); }},
        {"run.data_eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_eps = parse_double(k, v); }},
        {"run.data_shape_width", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_shape_width = parse_double(k, v); }},
        {"run.snapshot_stride", [](RunConfig& c, const std::string& k, const std::string& v) { c.snapshot_stride = parse_double(k, v); }},
        {"run.workers", [](RunConfig& c, const std::string& k, const std::string& v) { c.workers = parse_int(k, v); }},
        {"detect.amp_threshold", [](RunConfig& c, const std::string& k, const std::string& v) { c.amp_threshold = parse_double(k, v); }},
        {"detect.fit_window", [](RunConfig& c, const std::string& k, const std::string& v) { c.fit_window = parse_int(k, v); }},
        {"lp.delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_delta = parse_double(k, v); }},
        {"lp.big_C", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_big_C = parse_double(k, v); }},
        {"lp.N", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_N = parse_double(k, v); }},
        {"lp.omega_bar", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_omega_bar = parse_double(k, v); }},
        {"lp.tau_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_tau_max = parse_double(k, v); }},
        {"lp.picard_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.lp_picard_tol = parse_double(k, v); }},
        {"control.T1", [](RunConfig& c, const std::string& k, const std::string& v) { c.T1 = parse_double(k, v); }},
    };
    const auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown config key: " + key);
    it->second(c, key, value);
}

void apply_line(RunConfig& c, const std::string& raw) {
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) return;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config line is not key = value: " + raw);
    apply(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

}  // namespace

void RunConfig::validate() const {
    if (d < 3) throw std::invalid_argument("model.d: need d >= 3");
    SobolevOrder order{s, k};
    try {
        order.validate(n());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("model.s/model.k: ") + e.what());
    }
    if (!(r_max > 0)) throw std::invalid_argument("grid.r_max: must be positive");
    if (n_points < 8) throw std::invalid_argument("grid.n_points: need >= 8");
    if (!(dt_factor > 0) || dt_factor > 1.0)
        throw std::invalid_argument("grid.dt_factor: must lie in (0, 1]");
    if (noise_c < 0) throw std::invalid_argument("noise.c: must be >= 0");
    if (noise_modes < 1) throw std::invalid_argument("noise.modes: need >= 1");
    if (!(t_final > 0)) throw std::invalid_argument("run.t_final: must be positive");
    if (!(horizon > 0) || horizon > t_final + 1e-12)
        throw std::invalid_argument("run.horizon: must lie in (0, t_final]");
    if (paths < 1) throw std::invalid_argument("run.paths: need >= 1");
    if (data != "zero" && data != "self_similar" && data != "self_similar_perturbed" &&
        data.rfind("file:", 0) != 0)
        throw std::invalid_argument("run.data: unknown selector " + data);
    if (!(data_T > 0)) throw std::invalid_argument("run.data_T: must be positive");
    if (data_eps < 0) throw std::invalid_argument("run.data_eps: must be >= 0");
    if (!(data_shape_width > 0))
        throw std::invalid_argument("run.data_shape_width: must be positive");
    if (snapshot_stride < 0)
        throw std::invalid_argument("run.snapshot_stride: must be >= 0");
    if (workers < 0) throw std::invalid_argument("run.workers: must be >= 0");
    if (!(amp_threshold > 0))
        throw std::invalid_argument("detect.amp_threshold: must be positive");
    if (fit_window < 8) throw std::invalid_argument("detect.fit_window: need >= 8");
    if (!(lp_delta > 0)) throw std::invalid_argument("lp.delta: must be positive");
    if (!(lp_big_C >= 1.0)) throw std::invalid_argument("lp.big_C: need >= 1");
    if (!(lp_N >= 1.0)) throw std::invalid_argument("lp.N: need >= 1");
    if (!(lp_omega_bar > 0))
        throw std::invalid_argument("lp.omega_bar: must be positive");
    if (!(lp_tau_max > 0)) throw std::invalid_argument("lp.tau_max: must be positive");
    if (!(lp_picard_tol > 0))
        throw std::invalid_argument("lp.picard_tol: must be positive");
    if (!(T1 > 0)) throw std::invalid_argument("control.T1: must be positive");
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    out.precision(17);
    out << "model.d = " << d << '\n';
    out << "model.s = " << s << '\n';
    out << "model.k = " << k << '\n';
    out << "grid.r_max = " << r_max << '\n';
    out << "grid.n_points = " << n_points << '\n';
    out << "grid.dt_factor = " << dt_factor << '\n';
    out << "noise.c = " << noise_c << '\n';
    out << "noise.beta = " << noise_beta << '\n';
    out << "noise.modes = " << noise_modes << '\n';
    out << "run.t_final = " << t_final << '\n';
    out << "run.horizon = " << horizon << '\n';
    out << "run.paths = " << paths << '\n';
    out << "run.seed = " << seed << '\n';
    out << "run.data = " << data << '\n';
    out << "run.data_T = " << data_T << '\n';
    out << "run.data_eps = " << data_eps << '\n';
    out << "run.data_shape_width = " << data_shape_width << '\n';
    out << "run.snapshot_stride = " << snapshot_stride << '\n';
    out << "run.workers = " << workers << '\n';
    out << "detect.amp_threshold = " << amp_threshold << '\n';
    out << "detect.fit_window = " << fit_window << '\n';
    out << "lp.delta = " << lp_delta << '\n';
    out << "lp.big_C = " << lp_big_C << '\n';
    out << "lp.N = " << lp_N << '\n';
    out << "lp.omega_bar = " << lp_omega_bar << '\n';
    out << "lp.tau_max = " << lp_tau_max << '\n';
    out << "lp.picard_tol = " << lp_picard_tol << '\n';
    out << "control.T1 = " << T1 << '\n';
    return out.str();
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file " + path);
        std::string line;
        while (std::getline(in, line)) apply_line(cfg, line);
    }
    for (const std::string& ov : overrides) apply_line(cfg, ov);
    cfg.validate();
    return cfg;
}

}  // namespace corowave
