#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gsr/errors.hpp"
#include "gsr/generate.hpp"
#include "gsr/gomp.hpp"
#include "gsr/io.hpp"
#include "gsr/metrics.hpp"
#include "gsr/rng.hpp"
#include "gsr/solver.hpp"

namespace gsr {

/**
 * Batch experiment configuration. JSON layout:
 *
 * {
 *   "params": {"n":800, "N":500, "T":[10,20], "s":4,
 *              "dr":10.0, "theta":0.0, "sigma":1e-3},
 *   "trials": 100,
 *   "solvers": ["gpdasc", "gomp"],
 *   "seed": 1,
 *   "out_dir": "results",
 *   "eps_inflation": 1.0,   // optional, scales the discrepancy level
 *   "threads": 0,           // optional, 0 = all hardware threads
 *   "rho": 0.7, "kmax": 5,  // optional solver knobs
 *   "gomp_max_groups": 0,   // optional, 0 = floor(n/s)
 *   "gomp_selection": "raw" // or "transformed"
 * }
 *
 * "T" may be a single integer or an array (the swept parameter); "p" is
 * optional and defaults to N*s. Trial (point, index) pairs map to RNG
 * streams via split_stream(split_stream(seed, point), trial), so results
 * do not depend on the thread count.
 */
struct BenchConfig {
    GenParams base;
    std::vector<Index> t_values;
    int trials = 0;
    std::vector<std::string> solvers;
    std::uint64_t seed = 0;
    std::string out_dir;
    double eps_inflation = 1.0;
    int threads = 0;
    double rho = 0.7;
    int k_max = 5;
    Index t_cap = 0;  ///< 0 = none, -1 = auto (2T+10), >0 absolute group cap
    Index gomp_max_groups = 0;
    GompSelection gomp_selection = GompSelection::raw;

    static BenchConfig from_json(const nlohmann::json& j);
    static BenchConfig from_json_file(const std::string& path);
};

inline BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
    BenchConfig cfg;
    try {
        const auto& p = j.at("params");
        cfg.base.n = p.at("n").get<Index>();
        cfg.base.N = p.at("N").get<Index>();
        cfg.base.s = p.at("s").get<Index>();
        cfg.base.p = p.contains("p") ? p.at("p").get<Index>() : cfg.base.N * cfg.base.s;
        cfg.base.dynamic_range = p.at("dr").get<double>();
        cfg.base.theta = p.at("theta").get<double>();
        cfg.base.sigma = p.at("sigma").get<double>();
        const auto& t = p.at("T");
        if (t.is_array())
            for (const auto& v : t) cfg.t_values.push_back(v.get<Index>());
        else
            cfg.t_values.push_back(t.get<Index>());
        cfg.trials = j.at("trials").get<int>();
        for (const auto& s : j.at("solvers")) cfg.solvers.push_back(s.get<std::string>());
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.out_dir = j.at("out_dir").get<std::string>();
        cfg.eps_inflation = j.value("eps_inflation", 1.0);
        cfg.threads = j.value("threads", 0);
        cfg.rho = j.value("rho", 0.7);
        cfg.k_max = j.value("kmax", 5);
        cfg.t_cap = j.value("t_cap", Index{0});
        cfg.gomp_max_groups = j.value("gomp_max_groups", Index{0});
        const std::string sel = j.value("gomp_selection", std::string("raw"));
        if (sel == "raw")
            cfg.gomp_selection = GompSelection::raw;
        else if (sel == "transformed")
            cfg.gomp_selection = GompSelection::transformed;
        else
            throw InvalidArgument("bench config: unknown gomp_selection '" + sel + "'");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bench config: ") + e.what());
    }
    if (cfg.trials < 0) throw InvalidArgument("bench config: trials must be >= 0");
    if (cfg.solvers.empty()) throw InvalidArgument("bench config: no solvers listed");
    for (const auto& s : cfg.solvers)
        if (s != "gpdasc" && s != "gomp")
            throw InvalidArgument("bench config: unknown solver '" + s + "'");
    if (cfg.t_values.empty()) throw InvalidArgument("bench config: no T values");
    return cfg;
}

inline BenchConfig BenchConfig::from_json_file(const std::string& path) {
    auto in = detail::open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
    return from_json(j);
}

struct TrialRecord {
    Index t_groups = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string solver;
    bool recovered = false;
    double relative_error = 0.0;
    double psnr = 0.0;
    double residual_norm = 0.0;
    Index n_active = 0;
    int outer_steps = 0;
    long total_inner = 0;
    std::string termination;
    double time_ms = 0.0;  ///< written to the timing files only
};

struct AggregateRecord {
    Index t_groups = 0;
    std::string solver;
    int trials = 0;
    double recovery_prob = 0.0;
    double mean_relative_error = 0.0;
    double mean_time_ms = 0.0;  ///< written to the timing files only
};

struct BenchResult {
    std::vector<TrialRecord> trials;
    std::vector<AggregateRecord> aggregate;
    std::string trials_csv;
    std::string aggregate_csv;
    std::string timing_csv;
    std::string timing_aggregate_csv;
};

namespace detail {

inline TrialRecord run_one_trial(const BenchConfig& cfg, Index t_groups, int trial,
                                 const std::string& solver) {
    TrialRecord rec;
    rec.t_groups = t_groups;
    rec.trial = trial;
    rec.solver = solver;

    GenParams params = cfg.base;
    params.T = t_groups;
    params.seed = split_stream(
        split_stream(cfg.seed, static_cast<std::uint64_t>(t_groups)),
        static_cast<std::uint64_t>(trial));
    rec.seed = params.seed;
    const ProblemInstance inst = generate_instance(params);
    const double eps = inst.noise_norm * cfg.eps_inflation;

    const auto t0 = std::chrono::steady_clock::now();
    Vector x_hat;
    if (solver == "gpdasc") {
        SolverConfig sc;
        sc.rho = cfg.rho;
        sc.k_max = cfg.k_max;
        sc.eps = eps;
        if (cfg.t_cap > 0)
            sc.t_cap = cfg.t_cap;
        else if (cfg.t_cap == -1)
            sc.t_cap = std::min(2 * t_groups + 10, cfg.base.N);
        const SolutionPath path = gpdasc_path(inst.design, inst.y, sc);
        x_hat = path.final_state.x;
        rec.n_active = path.final_state.active.count();
        rec.outer_steps = static_cast<int>(path.steps.size()) - 1;
        for (const auto& st : path.steps) rec.total_inner += st.inner_iterations;
        rec.termination = to_string(path.termination);
        rec.recovered = exact_recovery(path.final_state.active, inst.true_active);
    } else {
        GompConfig gc;
        gc.max_groups = cfg.gomp_max_groups;
        gc.residual_tol = eps;
        gc.selection = cfg.gomp_selection;
        const GompResult res = gomp(inst.design, inst.y, gc);
        x_hat = res.x;
        rec.n_active = res.active.count();
        rec.outer_steps = static_cast<int>(res.residual_history.size());
        rec.total_inner = rec.outer_steps;
        rec.termination = res.ill_posed_stop ? "gomp-ill-posed"
                          : res.residual_norm <= gc.residual_tol ? "gomp-tol"
                                                                 : "gomp-budget";
        rec.recovered = exact_recovery(res.active, inst.true_active);
    }
    rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t0)
                      .count();

    const Metrics m = compute_metrics(x_hat, inst);
    rec.relative_error = m.relative_error;
    rec.psnr = m.psnr;
    rec.residual_norm = m.residual_norm;
    return rec;
}

}  // namespace detail

/**
 * Run the sweep. Trials execute in parallel (config.threads workers);
 * every trial owns its RNG stream and results land in preallocated slots,
 * so the metric CSVs are bit-identical for any thread count and across
 * repeated runs. Wall-clock times go to the separate timing files.
 */
inline BenchResult run_benchmark(const BenchConfig& cfg) {
    {
        GenParams check = cfg.base;  // validate everything except the swept T
        check.T = 1;
        check.validate();
    }
    for (Index t : cfg.t_values)
        if (t < 1 || t > cfg.base.N)
            throw InvalidArgument("bench config: T value out of range");

    struct Job {
        Index t_groups;
        int trial;
        std::string solver;
    };
    std::vector<Job> jobs;
    for (Index t : cfg.t_values)
        for (int trial = 0; trial < cfg.trials; ++trial)
            for (const auto& solver : cfg.solvers) jobs.push_back({t, trial, solver});

    BenchResult result;
    result.trials.resize(jobs.size());
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, std::max<std::size_t>(jobs.size(), 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            result.trials[i] =
                detail::run_one_trial(cfg, jobs[i].t_groups, jobs[i].trial, jobs[i].solver);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (Index t : cfg.t_values) {
        for (const auto& solver : cfg.solvers) {
            AggregateRecord agg;
            agg.t_groups = t;
            agg.solver = solver;
            double err_sum = 0.0, time_sum = 0.0;
            int hits = 0;
            for (const auto& rec : result.trials) {
                if (rec.t_groups != t || rec.solver != solver) continue;
                ++agg.trials;
                hits += rec.recovered ? 1 : 0;
                err_sum += rec.relative_error;
                time_sum += rec.time_ms;
            }
            if (agg.trials > 0) {
                agg.recovery_prob = static_cast<double>(hits) / agg.trials;
                agg.mean_relative_error = err_sum / agg.trials;
                agg.mean_time_ms = time_sum / agg.trials;
            }
            result.aggregate.push_back(std::move(agg));
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    result.trials_csv = (fs::path(cfg.out_dir) / "trials.csv").string();
    result.aggregate_csv = (fs::path(cfg.out_dir) / "aggregate.csv").string();
    result.timing_csv = (fs::path(cfg.out_dir) / "timing.csv").string();
    result.timing_aggregate_csv = (fs::path(cfg.out_dir) / "timing_aggregate.csv").string();

    {
        auto out = detail::open_out(result.trials_csv);
        out << "T,trial,seed,solver,exact_recovery,rel_error,psnr,residual,n_active,"
               "outer_steps,inner_iters,termination\n";
        for (const auto& r : result.trials)
            out << r.t_groups << ',' << r.trial << ',' << r.seed << ',' << r.solver << ','
                << (r.recovered ? 1 : 0) << ',' << format_double(r.relative_error) << ','
                << format_double(r.psnr) << ',' << format_double(r.residual_norm) << ','
                << r.n_active << ',' << r.outer_steps << ',' << r.total_inner << ','
                << r.termination << '\n';
    }
    {
        auto out = detail::open_out(result.aggregate_csv);
        out << "T,solver,trials,recovery_prob,mean_rel_error\n";
        for (const auto& a : result.aggregate)
            out << a.t_groups << ',' << a.solver << ',' << a.trials << ','
                << format_double(a.recovery_prob) << ','
                << format_double(a.mean_relative_error) << '\n';
    }
    {
        auto out = detail::open_out(result.timing_csv);
        out << "T,trial,solver,time_ms\n";
        for (const auto& r : result.trials)
            out << r.t_groups << ',' << r.trial << ',' << r.solver << ','
                << format_double(r.time_ms) << '\n';
    }
    {
        auto out = detail::open_out(result.timing_aggregate_csv);
        out << "T,solver,trials,mean_time_ms\n";
        for (const auto& a : result.aggregate)
            out << a.t_groups << ',' << a.solver << ',' << a.trials << ','
                << format_double(a.mean_time_ms) << '\n';
    }
    return result;
}

inline BenchResult run_benchmark(const std::string& config_path) {
    return run_benchmark(BenchConfig::from_json_file(config_path));
}

}  // namespace gsr
