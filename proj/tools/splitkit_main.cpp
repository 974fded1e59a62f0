#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitkit/io.hpp"

namespace {

using namespace splitkit;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // validation or solver failure
constexpr int kExitBadInput = 2;  // parse errors, missing files

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

int cmd_validate(const std::string& design_file) {
    SplittingDesign design;
    try {
        design = load_design(design_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    auto cert = validate_assumption(design, design.sigma, design.lip);
    std::cout << cert.report();
    return cert.pass() ? kExitOk : kExitFailure;
}

void write_summary(const std::string& path, const SolveResult& result, const std::string& method,
                   bool diverged, const std::string& error) {
    if (path.empty()) return;
    nlohmann::json j;
    j["method"] = method;
    j["iterations"] = result.iterations;
    j["final_residual"] = result.final_residual;
    j["final_consensus"] = result.final_consensus;
    j["converged"] = result.converged;
    j["wall_seconds"] = result.wall_seconds;
    j["message"] = diverged ? error : result.message;
    j["solution"] = result.solution;
    std::ofstream out(path);
    if (out) out << j.dump(2) << "\n";
}

int cmd_run(const std::string& config_file) {
    ExperimentConfig cfg;
    BuiltProblem built;
    ResolvedMethod method;
    try {
        cfg = load_experiment_config(config_file);
        built = build_problem(cfg.problem);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    try {
        method = resolve_method(cfg.method, built.ops.sigma_diag(), built.ops.lip_diag(), cfg.problem.n,
                                cfg.problem.m, cfg.problem.l);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    SolverConfig sc;
    sc.gamma = cfg.method.gamma;
    sc.max_iter = cfg.run.max_iter;
    sc.tol = cfg.run.tol;
    sc.mode = method.mode;
    sc.metric_every = cfg.run.metric_every;
    if (cfg.run.metric == "objective") {
        if (!built.objective) {
            std::cerr << "error: objective metric needs the huber family\n";
            return kExitBadInput;
        }
        sc.metric = built.objective;
    } else if (cfg.run.metric == "gap") {
        if (!built.game) {
            std::cerr << "error: gap metric needs the game family\n";
            return kExitBadInput;
        }
        const GameProblem game = *built.game;
        const double gap_tol = cfg.run.gap_tol;
        sc.metric = [game, gap_tol](const Vec& x) {
            Vec u(x.begin(), x.begin() + game.d1);
            Vec v(x.begin() + game.d1, x.end());
            return primal_dual_gap(game, u, v, gap_tol).value;
        };
    } else if (cfg.run.metric != "none") {
        std::cerr << "error: unknown metric '" << cfg.run.metric << "'\n";
        return kExitBadInput;
    }

    SolveResult result;
    try {
        result = solve(built.ops, method.design, sc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_summary(cfg.summary_path, result, method.name, true, e.what());
        return kExitFailure;
    }
    if (!cfg.trace_path.empty()) write_trace_csv(result.trace, cfg.trace_path);
    write_summary(cfg.summary_path, result, method.name, false, "");
    std::cout << method.name << ": " << (result.converged ? "converged" : result.message) << " after "
              << result.iterations << " iterations, residual " << result.final_residual << "\n";
    return result.converged ? kExitOk : kExitFailure;
}

int cmd_select(const std::string& patterns_file, const std::string& sigma_csv, const std::string& lip_csv,
               long iters, double step, unsigned seed, const std::string& output) {
    PatternFile pf;
    Vec sigma, lip;
    try {
        pf = load_patterns(patterns_file);
        sigma = parse_csv_doubles(sigma_csv);
        lip = parse_csv_doubles(lip_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    try {
        UpsilonOptions opts;
        opts.iters = iters;
        opts.step = step;
        opts.start_seed = seed;
        SplittingDesign design = crfb_design(pf.n, pf.m, pf.l, sigma, lip, pf.patterns, opts);
        auto cert = validate_assumption(design, sigma, lip);
        if (!cert.pass()) {
            std::cerr << "selection produced a design failing validation:\n" << cert.report();
            return kExitFailure;
        }
        save_design(design, output);
        std::cout << "wrote " << output << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct BenchCell {
    int setting_idx;
    int seed_idx;
    int method_idx;
    std::vector<long> iters_to_eps;  // per epsilon; -1 = DNF
};

int cmd_bench(const std::string& suite_file) {
    BenchSuite suite;
    try {
        suite = load_bench_suite(suite_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::vector<BenchCell> cells;
    for (int si = 0; si < static_cast<int>(suite.settings.size()); ++si)
        for (int di = 0; di < static_cast<int>(suite.seeds.size()); ++di)
            for (int mi = 0; mi < static_cast<int>(suite.methods.size()); ++mi)
                cells.push_back({si, di, mi, {}});

    const double min_eps = *std::min_element(suite.epsilons.begin(), suite.epsilons.end());

    auto run_cell = [&](BenchCell& cell) {
        cell.iters_to_eps.assign(suite.epsilons.size(), -1);
        try {
            ProblemSpec pspec = suite.problem;
            pspec.seed = suite.seeds[cell.seed_idx];
            if (pspec.family == "game")
                pspec.distribution = suite.settings[cell.setting_idx];
            else
                pspec.scaling = suite.settings[cell.setting_idx];
            BuiltProblem built = build_problem(pspec);

            MethodSpec mspec = suite.method_params;
            mspec.preset = suite.methods[cell.method_idx];
            mspec.design_file.clear();
            ResolvedMethod method =
                resolve_method(mspec, built.ops.sigma_diag(), built.ops.lip_diag(), pspec.n, pspec.m, pspec.l);

            SolverConfig sc;
            sc.gamma = mspec.gamma;
            sc.max_iter = suite.max_iter;
            sc.tol = 1e-14;  // run on the metric, not the residual
            sc.mode = method.mode;
            sc.metric_every = suite.metric_every;
            if (built.game) {
                const GameProblem game = *built.game;
                const double gap_tol = suite.gap_tol;
                sc.metric = [game, gap_tol](const Vec& x) {
                    Vec u(x.begin(), x.begin() + game.d1);
                    Vec v(x.begin() + game.d1, x.end());
                    return primal_dual_gap(game, u, v, gap_tol).value;
                };
            } else {
                const HuberProblem hp = *built.huber;
                sc.metric = [hp](const Vec& x) { return fermat_residual(hp, x); };
            }
            sc.stop_when = [min_eps](const TraceRecord& rec) { return rec.metric && *rec.metric < min_eps; };

            SolveResult result = solve(built.ops, method.design, sc);
            for (std::size_t e = 0; e < suite.epsilons.size(); ++e) {
                for (const auto& rec : result.trace.records) {
                    if (rec.metric && *rec.metric < suite.epsilons[e]) {
                        cell.iters_to_eps[e] = rec.iter;
                        break;
                    }
                }
            }
        } catch (const std::exception&) {
            // failed runs stay DNF
        }
    };

    long threads = 1;
    if (const char* env = std::getenv("SPLITKIT_THREADS")) threads = std::max(1L, std::atol(env));
    threads = std::min<long>(threads, static_cast<long>(cells.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            run_cell(cells[idx]);
        }
    };
    std::vector<std::thread> pool;
    for (long t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Median iterations per (setting, epsilon, method) across seeds.
    std::ofstream out(suite.output);
    if (!out) {
        std::cerr << "error: cannot write " << suite.output << "\n";
        return kExitBadInput;
    }
    out << "setting,epsilon";
    for (const auto& mname : suite.methods) out << ',' << mname;
    out << '\n';
    for (int si = 0; si < static_cast<int>(suite.settings.size()); ++si) {
        for (std::size_t e = 0; e < suite.epsilons.size(); ++e) {
            out << suite.settings[si] << ',' << suite.epsilons[e];
            for (int mi = 0; mi < static_cast<int>(suite.methods.size()); ++mi) {
                std::vector<double> vals;
                for (int di = 0; di < static_cast<int>(suite.seeds.size()); ++di) {
                    for (const auto& cell : cells)
                        if (cell.setting_idx == si && cell.seed_idx == di && cell.method_idx == mi) {
                            vals.push_back(cell.iters_to_eps[e] < 0 ? std::numeric_limits<double>::infinity()
                                                                    : static_cast<double>(cell.iters_to_eps[e]));
                        }
                }
                std::sort(vals.begin(), vals.end());
                double median = vals.empty() ? std::numeric_limits<double>::infinity()
                                             : (vals.size() % 2 == 1
                                                    ? vals[vals.size() / 2]
                                                    : 0.5 * (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]));
                if (std::isinf(median))
                    out << ",DNF";
                else
                    out << ',' << median;
            }
            out << '\n';
        }
    }
    std::cout << "wrote " << suite.output << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"splitkit: reflected forward-backward splitting toolkit"};
    app.require_subcommand(1);

    std::string design_file;
    auto* validate = app.add_subcommand("validate", "certify a design file");
    validate->add_option("design", design_file, "design JSON file")->required();

    std::string config_file;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_file, "experiment config JSON")->required();

    std::string patterns_file, sigma_csv, lip_csv, select_out = "design.json";
    long sel_iters = 5000;
    double sel_step = 1.0;
    unsigned sel_seed = 0;
    auto* select = app.add_subcommand("select", "matrix selection from patterns");
    select->add_option("patterns", patterns_file, "patterns JSON file")->required();
    select->add_option("--sigma", sigma_csv, "cocoercivity constants, comma separated")->required();
    select->add_option("--lip", lip_csv, "Lipschitz constants, comma separated")->required();
    select->add_option("--iters", sel_iters, "subgradient iterations");
    select->add_option("--step", sel_step, "subgradient step scale");
    select->add_option("--seed", sel_seed, "start-point seed (0 = uniform start)");
    select->add_option("-o,--output", select_out, "output design file");

    std::string suite_file;
    auto* bench = app.add_subcommand("bench", "run a comparison suite");
    bench->add_option("suite", suite_file, "suite JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return cmd_validate(design_file);
    if (run->parsed()) return cmd_run(config_file);
    if (select->parsed()) return cmd_select(patterns_file, sigma_csv, lip_csv, sel_iters, sel_step, sel_seed, select_out);
    if (bench->parsed()) return cmd_bench(suite_file);
    return kExitBadInput;
}
