// prescience: best-subset maximum-score binary prediction rules.
//
// Subcommands: fit, cv, simulate, bounds, oracle-check, gen-synthetic.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 solver limit reached
// (results are still written), 4 internal error.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prescience/data.hpp"
#include "prescience/mio.hpp"
#include "prescience/oracle.hpp"
#include "prescience/rng.hpp"
#include "prescience/selection.hpp"
#include "prescience/sim.hpp"
#include "prescience/warmstart.hpp"

namespace {

using namespace prescience;

// ---------------------------------------------------------------- JSON output

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string json_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string json_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += json_num(v[i]);
    }
    return out + "]";
}

std::string json_array(const std::vector<std::size_t>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

const char* status_name(mio::SolveStatus s) {
    switch (s) {
        case mio::SolveStatus::Optimal: return "optimal";
        case mio::SolveStatus::GapReached: return "gap_reached";
        case mio::SolveStatus::NodeLimit: return "node_limit";
        case mio::SolveStatus::TimeLimit: return "time_limit";
        case mio::SolveStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

std::string report_json(const selection::FitReport& r) {
    const auto& res = r.result;
    std::vector<std::size_t> selected;
    for (std::size_t j = 0; j < res.coefficients.gamma.size(); ++j)
        if (std::abs(res.coefficients.gamma[j]) > score::kSelectionTol)
            selected.push_back(j);

    std::ostringstream os;
    os << "{\n";
    os << "  \"alpha\": " << res.coefficients.alpha << ",\n";
    os << "  \"beta\": " << json_array(res.coefficients.beta) << ",\n";
    os << "  \"gamma\": " << json_array(res.coefficients.gamma) << ",\n";
    os << "  \"selected_indices\": " << json_array(selected) << ",\n";
    os << "  \"q\": " << r.q << ",\n";
    os << "  \"score\": " << json_num(res.score) << ",\n";
    os << "  \"mio_gap\": " << json_num(res.mio_gap) << ",\n";
    os << "  \"nodes\": " << res.nodes_explored << ",\n";
    os << "  \"wall_seconds\": " << json_num(res.wall_seconds) << ",\n";
    os << "  \"status\": \"" << status_name(res.status) << "\",\n";
    os << "  \"cv_table\": [";
    for (std::size_t i = 0; i < r.cv_table.size(); ++i) {
        if (i) os << ",";
        os << "{\"q\": " << r.cv_table[i].q << ", \"mean_validation_score\": "
           << json_num(r.cv_table[i].mean_validation_score) << ", \"folds_used\": "
           << r.cv_table[i].folds_used << "}";
    }
    os << "],\n";
    os << "  \"warmstart\": {\"used\": " << (r.warmstart.used ? "true" : "false")
       << ", \"feasible\": "
       << ((r.warmstart.feasible_plus && r.warmstart.feasible_minus) ? "true" : "false")
       << ", \"volume_ratio\": " << json_num(r.warmstart.volume_ratio) << "}\n";
    os << "}\n";
    return os.str();
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::string>& args, std::uint64_t seed,
                    double wall_seconds) {
    std::ofstream out(out_path);
    if (!out) throw ArgumentError("cannot write manifest: " + out_path);
    out << "{\n  \"command\": \"" << json_escape(command) << "\",\n  \"args\": [";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out << ", ";
        out << '"' << json_escape(args[i]) << '"';
    }
    out << "],\n  \"seed\": " << seed << ",\n  \"version\": \"1.0.0\",\n"
        << "  \"wall_seconds\": " << json_num(wall_seconds) << "\n}\n";
}

// --------------------------------------------------------------- shared flags

struct CommonOpts {
    std::string data_path;
    std::string outcome = "y";
    std::string x0;
    std::vector<std::string> focus;
    std::vector<std::string> auxiliary;
    bool add_intercept = false;
    bool standardize = false;

    std::string formulation = "A";
    std::string epsilon_mode = "exact";
    double epsilon_fixed = 0.0;
    bool warm_start = false;
    double tau = 1.5;
    double bound = 10.0;
    std::uint64_t seed = 0;
    int folds = 5;
    long node_limit = -1;
    double time_limit = -1.0;
    int threads = 1;  // accepted for forward compatibility; solver is serial
    std::string out_path;
};

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--data", o.data_path, "input CSV path")->required();
    cmd->add_option("--outcome", o.outcome, "outcome column (values in {0,1})");
    cmd->add_option("--x0", o.x0, "scale-normalized focus covariate column")->required();
    cmd->add_option("--focus", o.focus, "remaining focus columns (free coefficients)");
    cmd->add_option("--aux", o.auxiliary, "auxiliary columns (subject to selection)");
    cmd->add_flag("--add-intercept", o.add_intercept,
                  "prepend an all-ones focus column");
    cmd->add_flag("--standardize", o.standardize,
                  "rescale covariates to mean 0, variance 1 (intercept excluded)");
}

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--formulation", o.formulation, "MIO formulation")
        ->check(CLI::IsMember({"A", "B"}));
    cmd->add_option("--epsilon-mode", o.epsilon_mode,
                    "gap tolerance: exact (0), rule, or fixed")
        ->check(CLI::IsMember({"exact", "rule", "fixed"}));
    cmd->add_option("--epsilon", o.epsilon_fixed, "tolerance used with --epsilon-mode fixed");
    cmd->add_flag("--warm-start", o.warm_start, "logit-based parameter-space tightening");
    cmd->add_option("--tau", o.tau, "warm-start enlargement factor (>= 1)");
    cmd->add_option("--bound", o.bound, "parameter box half-width L, box [-L,L]^(k+p)");
    cmd->add_option("--seed", o.seed, "RNG seed (fold splits, synthetic draws)");
    cmd->add_option("--folds", o.folds, "cross-validation folds");
    cmd->add_option("--node-limit", o.node_limit, "branch-and-bound node limit (<0: none)");
    cmd->add_option("--time-limit", o.time_limit, "per-solve time limit seconds (<0: none)");
    cmd->add_option("--threads", o.threads, "worker threads (currently serial)");
}

data::Dataset load_data(const CommonOpts& o) {
    data::Schema schema;
    schema.outcome = o.outcome;
    schema.x0 = o.x0;
    schema.focus = o.focus;
    schema.auxiliary = o.auxiliary;
    schema.add_intercept = o.add_intercept;
    auto d = data::load_csv(o.data_path, schema);
    if (o.standardize) d = data::standardize(d);
    return d;
}

selection::FitSpec make_spec(const CommonOpts& o, const std::vector<int>& q_candidates) {
    selection::FitSpec spec;
    spec.q_candidates = q_candidates;
    spec.folds = o.folds;
    if (o.epsilon_mode == "exact") spec.epsilon_mode = selection::EpsilonMode::Exact;
    else if (o.epsilon_mode == "rule") spec.epsilon_mode = selection::EpsilonMode::Rule;
    else spec.epsilon_mode = selection::EpsilonMode::Fixed;
    spec.epsilon_fixed = o.epsilon_fixed;
    spec.warm_start = o.warm_start;
    spec.tau = o.tau;
    spec.seed = o.seed;
    spec.mio.formulation =
        o.formulation == "A" ? mio::Formulation::A : mio::Formulation::B;
    spec.mio.node_limit = o.node_limit;
    spec.mio.time_limit = o.time_limit;
    return spec;
}

int exit_code_for(mio::SolveStatus s) {
    return (s == mio::SolveStatus::NodeLimit || s == mio::SolveStatus::TimeLimit) ? 3 : 0;
}

// ----------------------------------------------------------------- commands

int run_fit(const CommonOpts& o, const std::vector<int>& q_candidates,
            const std::vector<std::string>& argv_echo) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = load_data(o);
    const auto box = score::ParamBox::cube(d.k(), d.p(), o.bound);
    const auto spec = make_spec(o, q_candidates);
    const auto report = selection::fit(d, spec, box);

    const std::string json = report_json(report);
    if (o.out_path.empty()) {
        std::cout << json;
    } else {
        std::ofstream out(o.out_path);
        if (!out) throw ArgumentError("cannot write file: " + o.out_path);
        out << json;
    }

    std::cerr << "fit: q=" << report.q << " alpha=" << report.result.coefficients.alpha
              << " score=" << report.result.score << " gap=" << report.result.mio_gap
              << " status=" << status_name(report.result.status)
              << " nodes=" << report.result.nodes_explored << "\n";

    if (!o.out_path.empty()) {
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        write_manifest(o.out_path + ".manifest.json", "fit", argv_echo, o.seed, wall);
    }
    return exit_code_for(report.result.status);
}

int run_cv(const CommonOpts& o, const std::vector<int>& q_candidates,
           const std::vector<std::string>& argv_echo) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = load_data(o);
    const auto box = score::ParamBox::cube(d.k(), d.p(), o.bound);
    const auto spec = make_spec(o, q_candidates);
    const auto cv = selection::cross_validate_q(d, spec, box);

    std::ostringstream table;
    table << "q,mean_validation_score,folds_used\n";
    table.precision(12);
    for (const auto& row : cv.table)
        table << row.q << ',' << row.mean_validation_score << ',' << row.folds_used << '\n';

    if (o.out_path.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(o.out_path);
        if (!out) throw ArgumentError("cannot write file: " + o.out_path);
        out << table.str();
    }
    std::cerr << "cv: q_star=" << cv.q_star << "\n";
    if (!o.out_path.empty()) {
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        write_manifest(o.out_path + ".manifest.json", "cv", argv_echo, o.seed, wall);
    }
    return 0;
}

int run_simulate(const CommonOpts& o, const std::string& variant, std::size_t p,
                 std::size_t n_train, std::size_t n_valid, std::size_t reps,
                 const std::vector<int>& q_list, bool with_cv,
                 const std::vector<int>& cv_candidates,
                 const std::string& metrics_path, const std::string& timing_path,
                 const std::vector<std::string>& argv_echo) {
    const auto t0 = std::chrono::steady_clock::now();
    sim::DgpSpec spec;
    spec.variant = variant == "I" ? sim::DgpVariant::I : sim::DgpVariant::II;
    spec.p = p;
    spec.n_train = n_train;
    spec.n_valid = n_valid;
    spec.reps = reps;
    spec.seed = o.seed;
    spec.bound = o.bound;

    std::vector<sim::MethodSpec> methods;
    for (int q : q_list)
        methods.push_back({"PRESCIENCE(" + std::to_string(q) + ")", {q}});
    if (with_cv) methods.push_back({"PRE_CV", cv_candidates});
    if (methods.empty()) throw ArgumentError("simulate: no methods requested");

    mio::MioConfig cfg;
    cfg.formulation = o.formulation == "A" ? mio::Formulation::A : mio::Formulation::B;
    cfg.node_limit = o.node_limit;
    cfg.time_limit = o.time_limit;

    const auto result = sim::run_experiment(spec, methods, cfg, o.warm_start, o.folds);
    sim::write_metrics_csv(result, metrics_path);
    if (!timing_path.empty()) sim::write_timing_csv(result, timing_path);
    std::cerr << "simulate: wrote " << metrics_path << "\n";

    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(metrics_path + ".manifest.json", "simulate", argv_echo, o.seed, wall);
    return 0;
}

int run_bounds(const CommonOpts& o, int alpha, const std::vector<std::string>& argv_echo) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = load_data(o);
    const auto box = score::ParamBox::cube(d.k(), d.p(), o.bound);
    const auto logit = warmstart::fit_logit(d);
    const auto refined = warmstart::tighten_bounds(d, alpha, box,
                                                   logit.fitted_probabilities);

    std::ostringstream table;
    table << "variable,lower,upper\n";
    table.precision(12);
    if (refined.feasible) {
        std::vector<std::string> names = d.x_tilde_names;
        names.insert(names.end(), d.z_names.begin(), d.z_names.end());
        for (std::size_t j = 0; j < names.size(); ++j)
            table << names[j] << ',' << refined.l_hat[j] << ',' << refined.u_hat[j] << '\n';
    } else {
        std::cerr << "bounds: sign-matching constraints are infeasible; "
                     "no refinement available\n";
    }

    if (o.out_path.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(o.out_path);
        if (!out) throw ArgumentError("cannot write file: " + o.out_path);
        out << table.str();
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        write_manifest(o.out_path + ".manifest.json", "bounds", argv_echo, o.seed, wall);
    }
    return refined.feasible ? 0 : 3;
}

int run_oracle_check(std::size_t instances, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t failures = 0;
    for (std::size_t t = 0; t < instances; ++t) {
        const std::size_t n = 6 + rng.below(7);
        const std::size_t k = rng.below(2);
        const std::size_t p = 1 + rng.below(4);
        const int q = static_cast<int>(rng.below(std::min<std::size_t>(p, 2) + 1));

        data::Dataset d;
        d.y.resize(n);
        d.x0.resize(n);
        d.x_tilde = Matrix(n, k);
        d.z = Matrix(n, p);
        for (std::size_t j = 0; j < k; ++j) d.x_tilde_names.push_back("f" + std::to_string(j));
        for (std::size_t j = 0; j < p; ++j) d.z_names.push_back("z" + std::to_string(j));
        for (std::size_t i = 0; i < n; ++i) {
            d.y[i] = static_cast<int>(rng.below(2));
            d.x0[i] = rng.normal();
            for (std::size_t j = 0; j < k; ++j) d.x_tilde(i, j) = rng.normal();
            for (std::size_t j = 0; j < p; ++j) d.z(i, j) = rng.normal();
        }

        const auto box = score::ParamBox::cube(k, p, 10.0);
        const auto exact = oracle::exact_max_score(d, box, q, 1e-6);
        mio::MioConfig cfg;
        cfg.q = q;
        const auto res = mio::solve_prescience(d, box, cfg);
        const bool ok = res.has_incumbent && res.score == exact.best_score;
        std::cout << "instance " << t << ": n=" << n << " k=" << k << " p=" << p
                  << " q=" << q << " oracle=" << exact.best_score
                  << " solver=" << (res.has_incumbent ? res.score : -1.0)
                  << (ok ? "  PASS" : "  FAIL") << "\n";
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "oracle-check: all instances passed\n"
                                : "oracle-check: failures detected\n");
    return failures == 0 ? 0 : 4;
}

// Synthetic commute-mode style file: y, DCOST, CARS, DOVTT, DIVTT. The model
// is documented here: latent index -0.03*DCOST + 0.9*CARS - 0.02*DOVTT
// - 0.04*DIVTT + noise; y = 1{index >= 0}.
int run_gen_synthetic(std::size_t n, std::uint64_t seed, const std::string& out_path) {
    Rng rng(seed);
    std::ofstream out(out_path);
    if (!out) throw ArgumentError("cannot write file: " + out_path);
    out.precision(10);
    out << "y,DCOST,CARS,DOVTT,DIVTT\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double dcost = 40.0 * rng.normal();       // cents difference
        const double cars = static_cast<double>(rng.below(4));
        const double dovtt = 10.0 + 5.0 * rng.normal(); // minutes
        const double divtt = 15.0 + 8.0 * rng.normal();
        const double idx = -0.03 * dcost + 0.9 * cars - 0.02 * dovtt - 0.04 * divtt +
                           1.2 * rng.normal();
        out << (idx >= 0.0 ? 1 : 0) << ',' << dcost << ',' << cars << ',' << dovtt
            << ',' << divtt << '\n';
    }
    std::cerr << "gen-synthetic: wrote " << n << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prescience: best-subset maximum-score binary prediction rules"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file (flags override its values)");

    CommonOpts o;
    std::vector<int> q_candidates = {1};
    std::vector<std::string> argv_echo(argv + 1, argv + argc);

    auto* fit = app.add_subcommand("fit", "fit one rule (CV over q when several candidates)");
    add_data_flags(fit, o);
    add_solver_flags(fit, o);
    fit->add_option("--q", q_candidates, "cardinality bound(s); several values trigger CV");
    fit->add_option("--out", o.out_path, "JSON report path (default: stdout)");

    auto* cv = app.add_subcommand("cv", "cross-validate q and emit the CV table");
    add_data_flags(cv, o);
    add_solver_flags(cv, o);
    cv->add_option("--q", q_candidates, "q candidates")->required();
    cv->add_option("--out", o.out_path, "CV table CSV path (default: stdout)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment");
    std::string variant = "I";
    std::size_t sim_p = 10, sim_n = 100, sim_valid = 5000, sim_reps = 20;
    std::vector<int> sim_q = {1};
    bool sim_cv = false;
    std::vector<int> sim_cv_candidates = {1, 2, 3};
    std::string metrics_path = "metrics.csv", timing_path;
    simulate->add_option("--variant", variant, "DGP variant")
        ->check(CLI::IsMember({"I", "II"}));
    simulate->add_option("--p", sim_p, "number of auxiliary covariates");
    simulate->add_option("--n", sim_n, "training sample size");
    simulate->add_option("--valid", sim_valid, "validation sample size");
    simulate->add_option("--reps", sim_reps, "simulation repetitions");
    simulate->add_option("--q", sim_q, "fixed-q methods to run");
    simulate->add_flag("--cv", sim_cv, "also run the cross-validated method");
    simulate->add_option("--cv-candidates", sim_cv_candidates, "q candidates for --cv");
    simulate->add_option("--out-metrics", metrics_path, "metrics CSV path");
    simulate->add_option("--out-timing", timing_path, "timing CSV path (optional)");
    add_solver_flags(simulate, o);

    auto* bounds = app.add_subcommand("bounds", "refined parameter bounds table");
    int bounds_alpha = 1;
    add_data_flags(bounds, o);
    add_solver_flags(bounds, o);
    bounds->add_option("--alpha", bounds_alpha, "x0 coefficient sign")
        ->check(CLI::IsMember({-1, 1}));
    bounds->add_option("--out", o.out_path, "CSV path (default: stdout)");

    auto* ocheck = app.add_subcommand("oracle-check", "solver certification suite");
    std::size_t ocheck_instances = 50;
    std::uint64_t ocheck_seed = 1;
    ocheck->add_option("--instances", ocheck_instances, "number of random instances");
    ocheck->add_option("--seed", ocheck_seed, "RNG seed");

    auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic commute-style CSV");
    std::size_t gen_n = 100;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "synthetic.csv";
    gen->add_option("--n", gen_n, "rows");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*fit) return run_fit(o, q_candidates, argv_echo);
        if (*cv) return run_cv(o, q_candidates, argv_echo);
        if (*simulate)
            return run_simulate(o, variant, sim_p, sim_n, sim_valid, sim_reps, sim_q,
                                sim_cv, sim_cv_candidates, metrics_path, timing_path,
                                argv_echo);
        if (*bounds) return run_bounds(o, bounds_alpha, argv_echo);
        if (*ocheck) return run_oracle_check(ocheck_instances, ocheck_seed);
        if (*gen) return run_gen_synthetic(gen_n, gen_seed, gen_out);
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateColumnError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
