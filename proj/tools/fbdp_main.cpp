// fbdp: solve / sweep / simulate / policy-dump front end.
//
// Exit codes: 0 ok, 1 internal numerical failure, 2 calibration infeasible,
// 3 sweep finished with failed rows, 4 policy file parse error, 5 bad arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "fbdp/baselines.hpp"
#include "fbdp/belief.hpp"
#include "fbdp/errors.hpp"
#include "fbdp/policy_io.hpp"
#include "fbdp/simulate.hpp"
#include "fbdp/solver.hpp"

namespace {

using namespace fbdp;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_infeasible = 2;
constexpr int exit_partial_sweep = 3;
constexpr int exit_parse = 4;
constexpr int exit_usage = 5;

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
    cmd->add_option("--l-max", cfg.l_max, "half-width of the LLR grid")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-points", cfg.grid_points, "LLR grid size, odd")
        ->capture_default_str();
    cmd->add_option("--quad-order", cfg.quad_order,
                    "Gauss-Hermite order recorded in policy headers (the backup "
                    "integrates the tabulated value in closed form)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--coarse-steps", cfg.coarse_steps, "coarse scan points for the gap search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--refine-tol", cfg.refine_tol, "absolute tolerance of the gap search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--v-max", cfg.v_max, "amplitude-gap cap; 0 picks 6(1+sqrt(S))")
        ->capture_default_str();
    cmd->add_option("--v-eps", cfg.v_eps, "gaps below this are treated as silence")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--energy-tol", cfg.energy_rel_tol,
                    "relative energy tolerance of the calibration")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-lo", cfg.lambda_lo, "initial lower multiplier bracket")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-hi", cfg.lambda_hi, "initial upper multiplier bracket")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", cfg.max_calibration_iters, "calibration iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--density-floor", cfg.density_floor,
                    "node masses below this are not spread during propagation")
        ->capture_default_str();
}

int run_solve(const SolverConfig& cfg, const std::string& out) {
    const CalibratedSolution sol = calibrate_lambda(cfg);
    std::cout << "lambda = " << g17(sol.lambda) << '\n'
              << "ber = " << g17(sol.error_probability) << '\n'
              << "energy = " << g17(sol.achieved_energy) << '\n';
    if (!out.empty()) {
        save_policy(out, make_policy_file(cfg, sol));
        std::cout << "policy written to " << out << '\n';
    }
    return exit_ok;
}

bool parse_db_range(const std::string& text, std::vector<double>& out) {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3) return false;
    if (step <= 0.0 || hi < lo) return false;
    for (double db = lo; db <= hi + 1e-9; db += step)
        out.push_back(2.0 * std::pow(10.0, db / 10.0));
    return !out.empty();
}

int run_sweep(const SolverConfig& base, std::vector<int> ns, std::vector<double> ss,
              bool with_one_bit, bool with_sk, bool allow_big_n, long trials,
              std::uint64_t seed, const std::string& out) {
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    for (int n : ns) {
        if (n < 1) {
            std::cerr << "sweep: --n entries must be >= 1\n";
            return exit_usage;
        }
        if (n > 10 && !allow_big_n) {
            std::cerr << "sweep: N=" << n
                      << " exceeds the default cap of 10; pass --allow-big-n to run it\n";
            return exit_usage;
        }
    }
    for (double s : ss) {
        if (!(s > 0.0)) {
            std::cerr << "sweep: budgets must be positive\n";
            return exit_usage;
        }
    }

    std::vector<SweepRow> rows;
    bool any_failed = false;
    for (int n : ns) {
        for (double s : ss) {
            SweepRow row;
            row.S = s;
            row.N = n;
            row.eb_n0_db = 10.0 * std::log10(s / 2.0);
            row.ber_no_feedback = no_feedback_ber(s);
            if (with_one_bit) row.ber_one_bit = one_bit_optimize(s).ber;
            if (with_sk) row.ber_sk = sk_optimize(n, s).ber;
            SolverConfig cfg = base;
            cfg.stages = n;
            cfg.budget = s;
            try {
                const CalibratedSolution sol = calibrate_lambda(cfg);
                row.lambda = sol.lambda;
                row.ber_dp = sol.error_probability;
                row.energy_achieved = sol.achieved_energy;
                if (trials > 0) {
                    const EncoderSpec spec{&sol.solution.policy, cfg.v_eps};
                    const McReport mc =
                        monte_carlo(spec, static_cast<std::uint64_t>(trials), seed);
                    std::cerr << "spot-check N=" << n << " S=" << g17(s) << ": mc ber "
                              << g17(mc.ber_hat) << " vs dp " << g17(sol.error_probability)
                              << " (3 sigma = " << g17(3.0 * mc.ber_std_error) << ")\n";
                }
            } catch (const CalibrationError& e) {
                row.failed = true;
                any_failed = true;
                std::cerr << "sweep: N=" << n << " S=" << g17(s) << ": " << e.what() << '\n';
            }
            rows.push_back(row);
        }
    }

    if (out.empty()) {
        write_sweep_csv(std::cout, rows);
    } else {
        std::ofstream file(out);
        if (!file) {
            std::cerr << "sweep: cannot open " << out << " for writing\n";
            return exit_usage;
        }
        write_sweep_csv(file, rows);
    }
    return any_failed ? exit_partial_sweep : exit_ok;
}

int run_simulate(const std::string& path, long trials, std::uint64_t seed, int channels) {
    const PolicyFile f = load_policy(path);
    const EncoderSpec spec{&f.table, f.config.v_eps};
    McReport mc;
    if (channels == 1) {
        mc = monte_carlo(spec, static_cast<std::uint64_t>(trials), seed);
    } else {
        mc = monte_carlo(mimo_embed(spec, channels), static_cast<std::uint64_t>(trials), seed);
    }
    std::cout << "policy = " << path << " (N=" << f.table.stages << ", S="
              << g17(f.table.budget) << ")\n"
              << "trials = " << mc.trials << '\n'
              << "seed = " << mc.seed << '\n'
              << "channels = " << channels << '\n'
              << "mc ber = " << g17(mc.ber_hat) << " (std error " << g17(mc.ber_std_error)
              << ", 95% ci [" << g17(mc.ber_ci95_lo) << ", " << g17(mc.ber_ci95_hi) << "])\n"
              << "mc energy = " << g17(mc.mean_energy) << " (std error "
              << g17(mc.energy_std_error) << ", 95% ci [" << g17(mc.energy_ci95_lo) << ", "
              << g17(mc.energy_ci95_hi) << "])\n"
              << "dp ber = " << g17(f.ber) << '\n'
              << "dp energy = " << g17(f.energy) << '\n';
    return exit_ok;
}

int run_policy_dump(const std::string& path, int stage, const std::string& coords,
                    const std::string& out) {
    const PolicyFile f = load_policy(path);
    if (stage < 1 || stage > f.table.stages) {
        std::cerr << "policy-dump: stage " << stage << " out of range 1.." << f.table.stages
                  << '\n';
        return exit_usage;
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "policy-dump: cannot open " << out << " for writing\n";
            return exit_usage;
        }
        os = &file;
    }
    if (coords == "state") {
        dump_stage(*os, f.table, stage);
    } else {
        if (stage != 2) {
            std::cerr << "policy-dump: --coords y1 only applies to stage 2\n";
            return exit_usage;
        }
        dump_second_stage_vs_y1(*os, f.table);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-optimal one-bit signalling over the unit-variance AWGN channel "
                 "with noiseless feedback"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread count (0 keeps the library default)");
    app.set_config("--config", "",
                   "read option defaults from an INI file whose sections name the "
                   "subcommand, e.g. [solve]; explicit flags win over the file");

    // CLI11 only reads the config file on the app that owns it, so the option
    // lives on the main app and subcommands let unmatched flags (--config,
    // --threads) fall through to it.
    const auto common = [](CLI::App* cmd) {
        cmd->fallthrough();
        return cmd;
    };

    // solve
    CLI::App* solve = common(app.add_subcommand("solve", "calibrate a policy for one (N, S) point"));
    SolverConfig solve_cfg;
    std::string solve_out;
    solve->add_option("--n", solve_cfg.stages, "number of channel uses")
        ->required()
        ->check(CLI::PositiveNumber);
    solve->add_option("--s", solve_cfg.budget, "expected energy budget")
        ->required()
        ->check(CLI::PositiveNumber);
    add_solver_flags(solve, solve_cfg);
    solve->add_option("--out", solve_out, "write the calibrated policy to this path");

    // sweep
    CLI::App* sweep = common(app.add_subcommand("sweep", "tabulate BER against baselines over (N, S)"));
    SolverConfig sweep_cfg;
    std::vector<int> sweep_n;
    std::vector<double> sweep_s;
    std::string sweep_db;
    std::string sweep_out;
    bool sweep_one_bit = false;
    bool sweep_sk = false;
    bool sweep_big_n = false;
    long sweep_trials = 0;
    std::uint64_t sweep_seed = 1;
    sweep->add_option("--n", sweep_n, "delay constraints to sweep, comma separated")
        ->required()
        ->delimiter(',');
    CLI::Option* s_opt =
        sweep->add_option("--s", sweep_s, "energy budgets to sweep, comma separated")
            ->delimiter(',');
    CLI::Option* db_opt = sweep->add_option(
        "--db", sweep_db, "budgets as an Eb/N0 range lo:hi:step in dB (N0 = 2)");
    s_opt->excludes(db_opt);
    db_opt->excludes(s_opt);
    add_solver_flags(sweep, sweep_cfg);
    sweep->add_flag("--one-bit", sweep_one_bit, "fill the one-bit feedback baseline column");
    sweep->add_flag("--sk", sweep_sk, "fill the linear-feedback baseline column");
    sweep->add_flag("--allow-big-n", sweep_big_n, "permit N above the default cap of 10");
    sweep->add_option("--trials", sweep_trials,
                      "Monte Carlo spot-check trials per row (0 disables)");
    sweep->add_option("--seed", sweep_seed, "spot-check seed");
    sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");

    // simulate
    CLI::App* simulate = common(app.add_subcommand("simulate", "Monte Carlo a saved policy"));
    std::string sim_policy;
    long sim_trials = 100000;
    std::uint64_t sim_seed = 1;
    int sim_channels = 1;
    simulate->add_option("--policy", sim_policy, "policy file to run")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--trials", sim_trials, "number of trials")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--m", sim_channels, "parallel AWGN channels per use")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // policy-dump
    CLI::App* dump = common(app.add_subcommand("policy-dump", "emit policy curves as CSV"));
    std::string dump_policy;
    int dump_stage_k = 1;
    std::string dump_coords = "state";
    std::string dump_out;
    dump->add_option("--policy", dump_policy, "policy file to dump")
        ->required()
        ->check(CLI::ExistingFile);
    dump->add_option("--stage", dump_stage_k, "stage to dump")->capture_default_str();
    dump->add_option("--coords", dump_coords,
                     "state: (l, v) rows; y1: stage-2 amplitudes against the first output")
        ->capture_default_str()
        ->check(CLI::IsMember({"state", "y1"}));
    dump->add_option("--out", dump_out, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (solve->parsed()) return run_solve(solve_cfg, solve_out);
        if (sweep->parsed()) {
            if (!sweep_db.empty() && !parse_db_range(sweep_db, sweep_s)) {
                std::cerr << "sweep: --db expects lo:hi:step with step > 0\n";
                return exit_usage;
            }
            if (sweep_s.empty()) {
                std::cerr << "sweep: provide --s values or a --db range\n";
                return exit_usage;
            }
            return run_sweep(sweep_cfg, sweep_n, sweep_s, sweep_one_bit, sweep_sk, sweep_big_n,
                             sweep_trials, sweep_seed, sweep_out);
        }
        if (simulate->parsed())
            return run_simulate(sim_policy, sim_trials, sim_seed, sim_channels);
        if (dump->parsed())
            return run_policy_dump(dump_policy, dump_stage_k, dump_coords, dump_out);
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad arguments: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_ok;
}
