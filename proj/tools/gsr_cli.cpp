#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsr/gsr.hpp"

namespace {

namespace fs = std::filesystem;

gsr::GroupedDesign load_design(const std::string& design_path,
                               const std::string& partition_path) {
    gsr::Matrix psi = gsr::load_matrix_csv(design_path);
    gsr::GroupPartition part(gsr::load_partition_sizes(partition_path));
    gsr::GroupedDesign design = gsr::prepare_design(std::move(psi), std::move(part));
    if (!design.columns_unit_norm())
        std::cerr << "warning: design columns deviate from unit norm by up to "
                  << design.unit_norm_deviation() << "\n";
    return design;
}

int cmd_gen(const gsr::GenParams& params, const std::string& out_dir) {
    const gsr::ProblemInstance inst = gsr::generate_instance(params);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    gsr::save_matrix_csv((dir / "design.csv").string(), inst.design.matrix());
    gsr::save_partition_sizes((dir / "partition.csv").string(), inst.design.partition());
    gsr::save_vector((dir / "xtrue.csv").string(), inst.x_true);
    gsr::save_vector((dir / "y.csv").string(), inst.y);
    gsr::save_vector((dir / "yclean.csv").string(), inst.y_clean);
    gsr::save_index_list((dir / "active.csv").string(), inst.true_active.members());
    nlohmann::json meta{{"n", inst.params.n},
                        {"p", inst.params.p},
                        {"N", inst.params.N},
                        {"T", inst.params.T},
                        {"s", inst.params.s},
                        {"dr", inst.params.dynamic_range},
                        {"theta", inst.params.theta},
                        {"sigma", inst.params.sigma},
                        {"seed", inst.params.seed},
                        {"noise_norm", inst.noise_norm}};
    std::ofstream((dir / "meta.json").string()) << meta.dump(2) << "\n";
    std::cout << "wrote instance to " << out_dir << " (noise norm "
              << gsr::format_double(inst.noise_norm) << ")\n";
    return 0;
}

void write_path_log(const std::string& path, const gsr::SolutionPath& solution) {
    std::ofstream out(path);
    out << "s,lambda,residual,n_active,inner_iters,time_ms\n";
    for (std::size_t s = 0; s < solution.steps.size(); ++s) {
        const auto& st = solution.steps[s];
        out << s << ',' << gsr::format_double(st.lambda) << ','
            << gsr::format_double(st.residual_norm) << ',' << st.active.count() << ','
            << st.inner_iterations << ',' << gsr::format_double(st.time_ms) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-sparse recovery toolkit: l0(l2)-regularized least squares with a "
                 "primal-dual active set continuation solver"};
    app.require_subcommand(1);

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic problem instance");
    gsr::Index g_n = 100, g_N = 50, g_T = 5, g_s = 4;
    double g_dr = 10.0, g_theta = 0.0, g_sigma = 1e-3;
    std::uint64_t g_seed = 1;
    std::string g_out = "instance";
    gen->add_option("-n,--rows", g_n, "number of measurements n");
    gen->add_option("-N,--groups", g_N, "number of groups N");
    gen->add_option("-T,--active", g_T, "number of active groups T");
    gen->add_option("-s,--group-size", g_s, "group size s");
    gen->add_option("--dr", g_dr, "dynamic range of the nonzero entries");
    gen->add_option("--theta", g_theta, "inner-group correlation strength");
    gen->add_option("--sigma", g_sigma, "noise standard deviation");
    gen->add_option("--seed", g_seed, "RNG seed");
    gen->add_option("-o,--out-dir", g_out, "output directory");

    // --- solve -------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "run the active-set continuation solver");
    std::string s_design, s_partition, s_data, s_out = "x.csv", s_log;
    double s_rho = 0.7;
    int s_kmax = 5, s_max_outer = 1000;
    std::optional<double> s_eps, s_lambda0, s_lambda_min;
    std::optional<gsr::Index> s_tcap;
    solve->add_option("--design", s_design, "design matrix CSV")->required();
    solve->add_option("--partition", s_partition, "group sizes file")->required();
    solve->add_option("--data", s_data, "measurement vector file")->required();
    solve->add_option("--rho", s_rho, "continuation decrease factor");
    solve->add_option("--kmax", s_kmax, "max inner iterations per lambda");
    solve->add_option("--eps", s_eps, "discrepancy stopping level (noise norm)");
    solve->add_option("--lambda0", s_lambda0, "initial lambda (default 0.5*||y||^2)");
    solve->add_option("--lambda-min", s_lambda_min, "path floor (default 1e-15*lambda0)");
    solve->add_option("--max-outer", s_max_outer, "max continuation steps");
    solve->add_option("--tcap", s_tcap, "stop when the active set exceeds this many groups");
    solve->add_option("-o,--out", s_out, "recovered signal output file");
    solve->add_option("--path-log", s_log, "continuation path log CSV");

    // --- gomp --------------------------------------------------------------
    auto* gomp_cmd = app.add_subcommand("gomp", "group orthogonal matching pursuit baseline");
    std::string m_design, m_partition, m_data, m_out = "x.csv";
    gsr::Index m_max_groups = 0;
    double m_tol = 0.0;
    std::string m_selection = "raw";
    gomp_cmd->add_option("--design", m_design, "design matrix CSV")->required();
    gomp_cmd->add_option("--partition", m_partition, "group sizes file")->required();
    gomp_cmd->add_option("--data", m_data, "measurement vector file")->required();
    gomp_cmd->add_option("--max-groups", m_max_groups, "selection budget (0 = floor(n/s))");
    gomp_cmd->add_option("--residual-tol", m_tol, "stop once the residual norm drops below");
    gomp_cmd->add_option("--selection", m_selection, "selection statistic: raw|transformed")
        ->check(CLI::IsMember({"raw", "transformed"}));
    gomp_cmd->add_option("-o,--out", m_out, "recovered signal output file");

    // --- bmc ---------------------------------------------------------------
    auto* bmc_cmd = app.add_subcommand("bmc", "coherence report for a grouped design");
    std::string c_design, c_partition, c_pairwise, c_out;
    bmc_cmd->add_option("--design", c_design, "design matrix CSV")->required();
    bmc_cmd->add_option("--partition", c_partition, "group sizes file")->required();
    bmc_cmd->add_option("--pairwise-csv", c_pairwise, "also write the pairwise matrix CSV");
    bmc_cmd->add_option("-o,--out", c_out, "write the JSON report here instead of stdout");

    // --- bench -------------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("bench", "batch experiment runner");
    std::string b_config, b_out_dir;
    std::optional<double> b_eps_inflation;
    std::optional<int> b_threads;
    bench_cmd->add_option("--config", b_config, "JSON experiment config")->required();
    bench_cmd->add_option("--out-dir", b_out_dir, "override the config's output directory");
    bench_cmd->add_option("--eps-inflation", b_eps_inflation,
                          "override the discrepancy-level scale factor");
    bench_cmd->add_option("--threads", b_threads, "override the worker count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            return cmd_gen(
                gsr::GenParams::make(g_n, g_N, g_T, g_s, g_dr, g_theta, g_sigma, g_seed),
                g_out);
        }
        if (*solve) {
            const gsr::GroupedDesign design = load_design(s_design, s_partition);
            const gsr::Vector y = gsr::load_vector(s_data);
            gsr::SolverConfig cfg;
            cfg.rho = s_rho;
            cfg.k_max = s_kmax;
            cfg.max_outer = s_max_outer;
            cfg.eps = s_eps;
            cfg.lambda0 = s_lambda0;
            cfg.lambda_min = s_lambda_min;
            cfg.t_cap = s_tcap;
            const gsr::SolutionPath path = gsr::gpdasc_path(design, y, cfg);
            gsr::save_vector(s_out, design.to_original_order(path.final_state.x));
            if (!s_log.empty()) write_path_log(s_log, path);
            std::cout << "termination: " << gsr::to_string(path.termination)
                      << ", steps: " << path.steps.size() - 1
                      << ", active groups: " << path.final_state.active.count()
                      << ", residual: " << gsr::format_double(path.final_state.residual_norm)
                      << "\n";
            return 0;
        }
        if (*gomp_cmd) {
            const gsr::GroupedDesign design = load_design(m_design, m_partition);
            const gsr::Vector y = gsr::load_vector(m_data);
            gsr::GompConfig cfg;
            cfg.max_groups = m_max_groups;
            cfg.residual_tol = m_tol;
            cfg.selection = m_selection == "raw" ? gsr::GompSelection::raw
                                                 : gsr::GompSelection::transformed;
            const gsr::GompResult res = gsr::gomp(design, y, cfg);
            gsr::save_vector(m_out, design.to_original_order(res.x));
            std::cout << "selected groups: " << res.active.count()
                      << ", residual: " << gsr::format_double(res.residual_norm)
                      << (res.ill_posed_stop ? " (stopped: ill-posed refit)" : "") << "\n";
            return 0;
        }
        if (*bmc_cmd) {
            const gsr::GroupedDesign design = load_design(c_design, c_partition);
            const gsr::CoherenceReport report = gsr::bmc(design);
            nlohmann::json j{{"mc", report.mc},
                             {"bmc", report.bmc},
                             {"assumption_T_max", report.assumption_T_max}};
            if (report.zero_bmc) j["bmc_zero"] = true;
            if (!c_pairwise.empty()) gsr::save_matrix_csv(c_pairwise, report.pairwise);
            if (c_out.empty())
                std::cout << j.dump(2) << "\n";
            else
                std::ofstream(c_out) << j.dump(2) << "\n";
            return 0;
        }
        if (*bench_cmd) {
            gsr::BenchConfig cfg = gsr::BenchConfig::from_json_file(b_config);
            if (!b_out_dir.empty()) cfg.out_dir = b_out_dir;
            if (b_eps_inflation) cfg.eps_inflation = *b_eps_inflation;
            if (b_threads) cfg.threads = *b_threads;
            const gsr::BenchResult res = gsr::run_benchmark(cfg);
            std::cout << "wrote " << res.trials_csv << ", " << res.aggregate_csv << ", "
                      << res.timing_csv << ", " << res.timing_aggregate_csv << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
