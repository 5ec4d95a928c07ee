#include "corowave/ensemble.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "corowave/profiles.hpp"
#include "corowave/version.hpp"

#include "json.hpp"

namespace corowave {

void EnsembleConfig::validate() const {
    if (paths < 1) throw std::invalid_argument("EnsembleConfig: paths must be >= 1");
    if (!(horizon > 0) || horizon > base.t_final + 1e-12)
        throw std::invalid_argument("EnsembleConfig: horizon must lie in (0, t_final]");
    if (!(data_T > 0)) throw std::invalid_argument("EnsembleConfig: data_T must be positive");
    if (data_eps < 0) throw std::invalid_argument("EnsembleConfig: data_eps must be >= 0");
    if (!(data_shape_width > 0))
        throw std::invalid_argument("EnsembleConfig: data_shape_width must be positive");
    if (workers < 0) throw std::invalid_argument("EnsembleConfig: workers must be >= 0");
    if (data == InitialData::custom && data_file.empty())
        throw std::invalid_argument("EnsembleConfig: custom data needs a file");
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

StatePair make_initial_data(const EnsembleConfig& cfg, const RadialGrid& grid, int d) {
    switch (cfg.data) {
        case InitialData::zero:
            return StatePair::zero(grid.n_points);
        case InitialData::self_similar:
            return u_T_state(0.0, grid, ProfileParams{d, cfg.data_T});
        case InitialData::self_similar_perturbed: {
            StatePair s = u_T_state(0.0, grid, ProfileParams{d, cfg.data_T});
            for (int j = 0; j < grid.n_points; ++j) {
                const double x = grid.r[j] / cfg.data_shape_width;
                s.u[j] += cfg.data_eps * std::exp(-x * x);
            }
            return s;
        }
        case InitialData::custom: {
            std::ifstream in(cfg.data_file);
            if (!in) throw std::runtime_error("cannot open data file " + cfg.data_file);
            StatePair s = StatePair::zero(grid.n_points);
            std::string line;
            int row = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                for (char& ch : line)
                    if (ch == ',') ch = ' ';
                std::istringstream ls(line);
                double a, b, c;
                if (!(ls >> a >> b)) continue;  // header or junk line
                if (ls >> c) {                  // r, u, u_hat
                    a = b;
                    b = c;
                }
                if (row >= grid.n_points)
                    throw std::runtime_error("data file has more rows than grid points");
                s.u[row] = a;
                s.u_hat[row] = b;
                ++row;
            }
            if (row != grid.n_points)
                throw std::runtime_error("data file row count does not match the grid");
            return s;
        }
    }
    throw std::logic_error("make_initial_data: unreachable");
}

namespace {

PathRecord run_one_path(int index, const EnsembleConfig& cfg, const RadialGrid& grid,
                        const ModalBasis& basis, const NoiseModel& model,
                        const SobolevOrder& order, const StatePair& initial) {
    PathRecord rec;
    rec.path_id = index;
    rec.seed = hash_seed(cfg.run_seed, static_cast<uint64_t>(index));
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const NoisePath noise =
            NoisePath::sample(model, cfg.base.dt(grid), cfg.base.t_final, rec.seed);
        ZPath zpath;
        const bool dpd = cfg.base.mode == SolveMode::dpd;
        if (dpd) zpath = convolution_from_increments(model, noise);
        const BlowupReport rep = solve(cfg.base, grid, initial, &basis, &noise,
                                       dpd ? &zpath : nullptr, order);
        rec.t_exit = rep.t_exit;
        rec.T_hat = rep.T_hat;
        rec.profile_err_final = rep.profile_err_final;
        rec.sup_amp = rep.sup_amp;
        rec.exit_norm_s = rep.exit_norm_s;
        rec.exit_norm_k = rep.exit_norm_k;
        rec.disc_sup = rep.disc_sup;
        rec.outcome = (rep.blew_up && rep.t_exit < cfg.horizon) ? "blowup" : "global";
    } catch (const std::exception&) {
        rec.outcome = "error";
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return rec;
}

void write_csv_row(std::ostream& out, const PathRecord& r) {
    out << r.path_id << ',' << r.seed << ',' << r.outcome << ','
        << std::setprecision(17) << r.t_exit << ',' << r.T_hat << ','
        << r.profile_err_final << ',' << r.sup_amp << ',' << r.exit_norm_s << ','
        << r.exit_norm_k << ',' << std::setprecision(6) << r.wall_ms << '\n';
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& cfg, const RadialGrid& grid,
                           const ModalBasis& basis, const NoiseModel& model,
                           const SobolevOrder& order, const std::string& records_csv,
                           const std::string& manifest_json,
                           const std::string& config_echo) {
    cfg.validate();
    cfg.base.validate(grid);
    if (basis.grid().n_points != grid.n_points)
        throw std::invalid_argument("run_ensemble: basis grid does not match");

    const int d = cfg.base.n - 2;
    const StatePair initial = make_initial_data(cfg, grid, d);

    const int paths = cfg.paths;
    int workers = cfg.workers > 0
                      ? cfg.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, paths));

    std::vector<PathRecord> records(paths);
    std::unique_ptr<std::atomic<uint8_t>[]> done(new std::atomic<uint8_t>[paths]);
    for (int i = 0; i < paths; ++i) done[i].store(0, std::memory_order_relaxed);
    std::atomic<int> next{0};

    const auto wall0 = std::chrono::steady_clock::now();
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= paths) break;
            records[i] = run_one_path(i, cfg, grid, basis, model, order, initial);
            done[i].store(1, std::memory_order_release);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);

    // stream records in path order as soon as every earlier path has finished
    std::ofstream csv;
    if (!records_csv.empty()) {
        csv.open(records_csv);
        if (!csv) {
            next.store(paths);  // stop the pool before throwing
            for (auto& th : pool) th.join();
            throw std::runtime_error("cannot open records file " + records_csv);
        }
        csv << "path_id,seed,outcome,t_exit,T_hat,profile_err_final,sup_amp,"
               "exit_norm_s,exit_norm_k,wall_ms\n";
    }
    int next_write = 0;
    while (next_write < paths) {
        if (done[next_write].load(std::memory_order_acquire)) {
            if (csv.is_open()) write_csv_row(csv, records[next_write]);
            ++next_write;
        } else {
            std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
    }
    for (auto& th : pool) th.join();
    if (csv.is_open()) csv.close();

    EnsembleStats stats;
    stats.wall_ms_total = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - wall0)
                              .count();
    double disc_sum = 0;
    for (const PathRecord& r : records) {
        if (r.outcome == "blowup") {
            ++stats.blowups;
            stats.T_hat_values.push_back(r.T_hat);
            disc_sum += r.profile_err_final;
        } else if (r.outcome == "global") {
            ++stats.globals;
        } else {
            ++stats.errors;
        }
    }
    stats.fraction = static_cast<double>(stats.blowups) / paths;
    stats.wilson = wilson_interval(stats.blowups, paths);
    if (stats.blowups > 0) {
        double sum = 0;
        for (double v : stats.T_hat_values) sum += v;
        stats.T_hat_mean = sum / stats.blowups;
        stats.disc_final_mean = disc_sum / stats.blowups;
    }
    stats.records = std::move(records);

    if (!manifest_json.empty()) {
        nlohmann::json j;
        j["version"] = kVersion;
        j["config_echo"] = config_echo;
        j["grid"] = {{"r_max", grid.r_max}, {"n_points", grid.n_points}};
        j["basis_checksum"] = basis.checksum();
        j["noise"] = {{"c", model.c}, {"beta", model.beta}, {"modes", model.modes}};
        j["paths"] = paths;
        j["run_seed"] = cfg.run_seed;
        j["horizon"] = cfg.horizon;
        j["workers"] = workers;
        j["blowups"] = stats.blowups;
        j["globals"] = stats.globals;
        j["errors"] = stats.errors;
        j["fraction"] = stats.fraction;
        j["wilson_lo"] = stats.wilson.lo;
        j["wilson_hi"] = stats.wilson.hi;
        j["T_hat_mean"] = stats.T_hat_mean;
        j["disc_final_mean"] = stats.disc_final_mean;
        j["wall_ms_total"] = stats.wall_ms_total;
        std::ofstream mf(manifest_json);
        if (!mf) throw std::runtime_error("cannot open manifest file " + manifest_json);
        mf << j.dump(2) << '\n';
    }
    return stats;
}

std::vector<SweepRow> amplitude_sweep(const EnsembleConfig& cfg,
                                      const RadialGrid& grid,
                                      const ModalBasis& basis,
                                      const NoiseModel& base_model,
                                      const SobolevOrder& order,
                                      const std::vector<double>& c_values) {
    std::vector<SweepRow> rows;
    rows.reserve(c_values.size());
    for (size_t i = 0; i < c_values.size(); ++i) {
        NoiseModel model =
            NoiseModel::make(basis, c_values[i], base_model.beta, base_model.modes);
        EnsembleConfig row_cfg = cfg;
        row_cfg.run_seed = hash_seed(cfg.run_seed, 7777 + i);
        const EnsembleStats stats =
            run_ensemble(row_cfg, grid, basis, model, order);
        SweepRow row;
        row.c = c_values[i];
        row.paths = cfg.paths;
        row.blowups = stats.blowups;
        row.fraction = stats.fraction;
        row.wilson = stats.wilson;
        rows.push_back(row);
    }
    return rows;
}

TriggerSearch find_trigger_amplitude(const EnsembleConfig& cfg,
                                     const RadialGrid& grid,
                                     const ModalBasis& basis,
                                     const NoiseModel& base_model,
                                     const SobolevOrder& order, double c0,
                                     int max_doublings) {
    if (!(c0 > 0)) throw std::invalid_argument("find_trigger_amplitude: c0 must be positive");
    TriggerSearch out;
    double c = c0;
    for (int k = 0; k <= max_doublings; ++k) {
        std::vector<SweepRow> row = amplitude_sweep(cfg, grid, basis, base_model,
                                                    order, {c});
        out.rows.push_back(row.front());
        if (row.front().wilson.lo > 0.0) {
            out.found = true;
            out.c_star = c;
            return out;
        }
        c *= 2.0;
    }
    return out;
}

}  // namespace corowave
