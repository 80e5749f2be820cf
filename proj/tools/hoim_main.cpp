// hoim: map SAT/MaxSAT instances onto coupled-oscillator Ising machines
// and run seeded solving experiments.
//
// Subcommands: solve, reduce, quadratize, resources, sweep, rerun.
// Exit codes: 0 done, 10 a solving run found an all-SAT assignment,
// 2 unreadable input, 3 DIMACS parse error, 4 invalid configuration,
// 130 interrupted. Logs go to stderr; data goes to files.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hoim/cnf.hpp"
#include "hoim/energy.hpp"
#include "hoim/quadratic.hpp"
#include "hoim/reduce.hpp"
#include "hoim/report.hpp"
#include "hoim/resources.hpp"
#include "hoim/solver.hpp"

namespace fs = std::filesystem;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_sigint(int) { g_interrupted = 1; }

constexpr int exit_ok = 0;
constexpr int exit_all_sat = 10;
constexpr int exit_unreadable = 2;
constexpr int exit_parse = 3;
constexpr int exit_config = 4;
constexpr int exit_interrupted = 130;

struct CliError {
    int code;
    std::string message;
};

hoim::CnfFormula load_formula(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{exit_unreadable, "cannot read " + path};
    try {
        return hoim::parse_dimacs(in);
    } catch (const hoim::ParseError& e) {
        throw CliError{exit_parse, path + ": " + e.what()};
    }
}

std::string instance_name(const std::string& path) { return fs::path(path).stem().string(); }

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw CliError{exit_unreadable, "cannot write " + path.string()};
    out << text;
}

void write_json_file(const fs::path& path, const hoim::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// Flags shared by solve, sweep and rerun. Optionals record which flags
// the user actually passed, so they override --config file values.
struct SolveFlags {
    std::optional<std::string> order;
    std::optional<int> exponent;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end, q_max, coupling, lambda, rho, omega, init_scale;
    std::optional<std::string> normalize;  // on|off
    std::optional<std::string> integrator;  // rk45|rk4
    std::optional<double> tol, step;
    std::optional<long long> max_steps;
    std::optional<int> workers;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--order", f.order, "machine order: higher | second")
        ->check(CLI::IsMember({"higher", "second"}));
    cmd->add_option("--exponent", f.exponent, "clause-term exponent: 1 | 2")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--trials", f.trials, "trials per instance");
    cmd->add_option("--seed", f.seed, "seed base; trial (i,j) uses seed + i*trials + j");
    cmd->add_option("--t-end", f.t_end, "annealing schedule duration in cycles");
    cmd->add_option("--q-max", f.q_max, "terminal injection-locking strength");
    cmd->add_option("--coupling", f.coupling, "gradient coupling strength r");
    cmd->add_option("--lambda", f.lambda, "oscillator gain");
    cmd->add_option("--rho", f.rho, "cubic nonlinearity magnitude");
    cmd->add_option("--omega", f.omega, "center frequency (rad per cycle)");
    cmd->add_option("--normalize", f.normalize, "normalize gradient argument: on | off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--integrator", f.integrator, "rk45 (adaptive) | rk4 (fixed)")
        ->check(CLI::IsMember({"rk45", "rk4"}));
    cmd->add_option("--tol", f.tol, "absolute and relative tolerance (rk45)");
    cmd->add_option("--step", f.step, "initial step (rk45) / fixed step (rk4)");
    cmd->add_option("--max-steps", f.max_steps, "integration step budget per trial");
    cmd->add_option("--init-scale", f.init_scale, "initial-condition disk radius");
    cmd->add_option("--workers", f.workers, "worker threads");
}

hoim::SolveConfig apply_flags(hoim::SolveConfig config, const SolveFlags& f) {
    hoim::OscillatorParams& p = config.trial.params;
    if (f.order) config.trial.machine = *f.order == "second" ? hoim::MachineOrder::second_order
                                                             : hoim::MachineOrder::higher_order;
    if (f.exponent) p.exponent = *f.exponent;
    if (f.trials) config.trials = *f.trials;
    if (f.seed) config.trial.seed = *f.seed;
    if (f.t_end) p.t_end = *f.t_end;
    if (f.q_max) p.q_max = *f.q_max;
    if (f.coupling) p.coupling = *f.coupling;
    if (f.lambda) p.lambda = *f.lambda;
    if (f.rho) p.rho = *f.rho;
    if (f.omega) p.omega = *f.omega;
    if (f.normalize) p.normalize = *f.normalize == "on";
    if (f.integrator)
        config.trial.integrator.method = *f.integrator == "rk4" ? hoim::StepperKind::fixed_rk4
                                                                : hoim::StepperKind::adaptive_rk45;
    if (f.tol) {
        config.trial.integrator.abs_tol = *f.tol;
        config.trial.integrator.rel_tol = *f.tol;
    }
    if (f.step) {
        config.trial.integrator.initial_step = *f.step;
        config.trial.integrator.fixed_step = *f.step;
    }
    if (f.max_steps) config.trial.integrator.max_steps = *f.max_steps;
    if (f.init_scale) config.trial.init_scale = *f.init_scale;
    if (f.workers) config.workers = *f.workers;
    return config;
}

hoim::SolveConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{exit_unreadable, "cannot read " + path};
    hoim::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CliError{exit_config, path + ": " + e.what()};
    }
    return hoim::solve_config_from_json(j.contains("config") ? j.at("config") : j);
}

void write_trace(const fs::path& path, const hoim::PreparedProblem& problem,
                 const hoim::TrialConfig& trial_config) {
    std::ofstream out(path);
    if (!out) throw CliError{exit_unreadable, "cannot write " + path.string()};
    out.precision(17);
    const int n = problem.oscillator_count();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",re_" << i;
    for (int i = 1; i <= n; ++i) out << ",im_" << i;
    out << "\n";
    auto sink = [&](double t, std::span<const hoim::cplx> z) {
        out << t;
        for (const hoim::cplx& v : z) out << ',' << v.real();
        for (const hoim::cplx& v : z) out << ',' << v.imag();
        out << "\n";
    };
    hoim::run_trial(problem, trial_config, sink);
}

int run_solve(const std::vector<std::string>& inputs, const hoim::SolveConfig& config,
              const fs::path& out_dir, const std::string& trace_path,
              const std::string& command_line) {
    try {
        validate(config.trial);
        if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
    } catch (const std::invalid_argument& e) {
        throw CliError{exit_config, e.what()};
    }

    std::vector<hoim::CnfFormula> formulas;
    std::vector<std::string> names;
    std::vector<hoim::InstanceStats> stats;
    for (const std::string& path : inputs) {
        formulas.push_back(load_formula(path));
        names.push_back(instance_name(path));
        stats.push_back(hoim::formula_stats(formulas.back()));
    }

    fs::create_directories(out_dir);
    std::ofstream csv(out_dir / "results.csv");
    if (!csv) throw CliError{exit_unreadable, "cannot write " + (out_dir / "results.csv").string()};
    csv << hoim::results_csv_header << "\n";

    std::vector<hoim::InstanceAggregate> aggregates;
    bool any_all_sat = false;
    bool truncated = false;
    for (size_t i = 0; i < formulas.size(); ++i) {
        if (g_interrupted) {
            truncated = true;
            break;
        }
        hoim::TrialConfig base = config.trial;
        base.seed = config.trial.seed + i * static_cast<std::uint64_t>(config.trials);
        hoim::BatchReport batch = [&] {
            try {
                if (i == 0 && !trace_path.empty())
                    write_trace(trace_path, hoim::prepare_problem(formulas[i], base), base);
                return hoim::run_batch({formulas[i]}, base, config.trials, config.workers);
            } catch (const std::invalid_argument& e) {
                throw CliError{exit_config, names[i] + ": " + e.what()};
            }
        }();
        const std::vector<hoim::TrialResult>& results = batch.results[0];
        for (size_t j = 0; j < results.size(); ++j)
            hoim::write_result_row(csv, names[i], base, static_cast<int>(j), results[j]);
        csv.flush();
        const hoim::InstanceAggregate& agg = batch.aggregates[0];
        any_all_sat = any_all_sat || agg.all_sat_probability > 0.0;
        std::cerr << names[i] << ": mean_energy=" << agg.mean_final_energy
                  << " frac=" << agg.mean_frac_satisfied << " p_all_sat=" << agg.all_sat_probability
                  << (agg.divergent ? " divergent=" + std::to_string(agg.divergent) : "") << "\n";
        aggregates.push_back(agg);
    }
    if (truncated) csv << "# truncated: interrupted before completing all instances\n";

    names.resize(aggregates.size());
    stats.resize(aggregates.size());
    write_json_file(out_dir / "aggregates.json",
                    hoim::aggregates_to_json(names, stats, aggregates, config));
    {
        std::ofstream agg_csv(out_dir / "aggregates.csv");
        agg_csv << "instance,num_vars,num_clauses,trials,divergent,mean_final_energy,"
                   "std_final_energy,mean_frac_satisfied,std_frac_satisfied,all_sat_probability,"
                   "mean_tts95,std_tts95,tts95_count\n";
        agg_csv.precision(17);
        for (size_t i = 0; i < aggregates.size(); ++i) {
            const hoim::InstanceAggregate& a = aggregates[i];
            agg_csv << names[i] << ',' << stats[i].num_vars << ',' << stats[i].num_clauses << ','
                    << a.trials << ',' << a.divergent << ',' << a.mean_final_energy << ','
                    << a.std_final_energy << ',' << a.mean_frac_satisfied << ','
                    << a.std_frac_satisfied << ',' << a.all_sat_probability << ',';
            if (a.mean_tts95) agg_csv << *a.mean_tts95;
            agg_csv << ',';
            if (a.std_tts95) agg_csv << *a.std_tts95;
            agg_csv << ',' << a.tts95_count << "\n";
        }
    }
    write_json_file(out_dir / "run_manifest.json",
                    hoim::make_manifest(command_line, config, inputs));
    if (truncated) return exit_interrupted;
    return any_all_sat ? exit_all_sat : exit_ok;
}

int run_reduce(const std::string& input, const std::string& output, std::string map_path) {
    hoim::CnfFormula formula = load_formula(input);
    if (formula.weighted)
        throw CliError{exit_config, "reduction supports unweighted CNF only"};
    auto [reduced, map] = hoim::reduce_to_3sat(formula);
    std::ofstream out(output);
    if (!out) throw CliError{exit_unreadable, "cannot write " + output};
    hoim::write_dimacs(reduced, out);
    if (map_path.empty()) map_path = output + ".map.json";
    write_json_file(map_path, hoim::to_json(map));
    std::cerr << input << ": " << formula.num_vars << " vars / " << formula.clauses.size()
              << " clauses -> " << reduced.num_vars << " vars / " << reduced.clauses.size()
              << " clauses\n";
    return exit_ok;
}

hoim::QuadraticModel quadratize_input(const hoim::CnfFormula& formula, const std::string& name) {
    for (const hoim::Clause& c : formula.clauses)
        if (c.literals.size() > 3)
            throw CliError{exit_config,
                           name + ": clause with more than 3 literals; run `hoim reduce` first"};
    return hoim::quadratize_3sat(hoim::build_energy(formula, 1));
}

int run_quadratize(const std::string& input, std::string output, const std::string& triples) {
    hoim::CnfFormula formula = load_formula(input);
    hoim::QuadraticModel model = quadratize_input(formula, input);
    if (output.empty()) output = instance_name(input) + ".quadratic.json";
    write_json_file(output, hoim::to_json(model));
    if (!triples.empty()) {
        std::ofstream out(triples);
        if (!out) throw CliError{exit_unreadable, "cannot write " + triples};
        hoim::write_triples(model, out);
    }
    std::cerr << input << ": " << model.num_original() << " original + "
              << model.num_spins() - model.num_original() << " auxiliary spins, "
              << model.couplings().size() << " couplings\n";
    return exit_ok;
}

int run_resources(const std::string& input, const std::string& scheme_name,
                  const std::string& order, const std::string& out_path) {
    const hoim::ConnectionScheme scheme = scheme_name == "all-to-all"
                                              ? hoim::ConnectionScheme::all_to_all
                                              : hoim::ConnectionScheme::hub_node;
    hoim::CnfFormula formula = load_formula(input);
    hoim::json j;
    std::optional<hoim::ResourceReport> higher, second;
    if (order == "higher" || order == "both")
        higher = hoim::count_resources(hoim::build_energy(formula, 1), scheme);
    if (order == "second" || order == "both")
        second = hoim::count_resources(quadratize_input(formula, input), scheme);
    if (higher) j["higher"] = hoim::to_json(*higher);
    if (second) j["second"] = hoim::to_json(*second);
    if (higher && second) {
        auto ratio = [](long long a, long long b) {
            return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
        };
        j["second_to_higher_ratio"] = {
            {"spins", ratio(second->spins, higher->spins)},
            {"connections", ratio(second->connections, higher->connections)},
            {"parameters", ratio(second->parameters, higher->parameters)}};
    }
    if (out_path.empty()) std::cout << j.dump(2) << "\n";
    else write_json_file(out_path, j);
    return exit_ok;
}

int run_sweep(const std::vector<std::string>& inputs, const std::string& grid_path,
              const hoim::SolveConfig& config, const fs::path& out_dir,
              const std::string& command_line) {
    std::ifstream grid_in(grid_path);
    if (!grid_in) throw CliError{exit_unreadable, "cannot read " + grid_path};
    hoim::json grid_json;
    try {
        grid_in >> grid_json;
    } catch (const std::exception& e) {
        throw CliError{exit_config, grid_path + ": " + e.what()};
    }
    hoim::SweepGrid grid;
    for (const auto& [key, value] : grid_json.items()) {
        std::vector<double>* axis = nullptr;
        if (key == "lambda") axis = &grid.lambda;
        else if (key == "rho") axis = &grid.rho;
        else if (key == "q_max") axis = &grid.q_max;
        else if (key == "coupling") axis = &grid.coupling;
        else if (key == "t_end") axis = &grid.t_end;
        else if (key == "init_scale") axis = &grid.init_scale;
        else throw CliError{exit_config, grid_path + ": unknown sweep parameter '" + key + "'"};
        if (!value.is_array() || value.empty())
            throw CliError{exit_config, grid_path + ": '" + key + "' must be a nonempty list"};
        *axis = value.get<std::vector<double>>();
    }

    std::vector<hoim::CnfFormula> formulas;
    for (const std::string& path : inputs) formulas.push_back(load_formula(path));

    std::vector<hoim::SweepPoint> table;
    try {
        table = hoim::parameter_sweep(formulas, config.trial, grid, config.trials, config.workers);
    } catch (const std::invalid_argument& e) {
        throw CliError{exit_config, e.what()};
    }

    fs::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "sweep.csv");
        csv.precision(17);
        csv << "rank,lambda,rho,q_max,coupling,t_end,init_scale,mean_all_sat,mean_final_energy,"
               "mean_frac_satisfied,divergent\n";
        for (size_t r = 0; r < table.size(); ++r) {
            const hoim::SweepPoint& p = table[r];
            csv << r << ',' << p.params.lambda << ',' << p.params.rho << ',' << p.params.q_max
                << ',' << p.params.coupling << ',' << p.params.t_end << ',' << p.init_scale << ','
                << p.mean_all_sat << ',' << p.mean_final_energy << ',' << p.mean_frac_satisfied
                << ',' << p.divergent << "\n";
        }
    }
    const hoim::SweepPoint& best = table.front();
    hoim::SolveConfig winner = config;
    winner.trial.params = best.params;
    winner.trial.init_scale = best.init_scale;
    hoim::json best_json = hoim::to_json(winner);
    best_json["metrics"] = {{"mean_all_sat", best.mean_all_sat},
                            {"mean_final_energy", best.mean_final_energy},
                            {"mean_frac_satisfied", best.mean_frac_satisfied},
                            {"divergent", best.divergent}};
    write_json_file(out_dir / "best.json", best_json);
    write_json_file(out_dir / "run_manifest.json",
                    hoim::make_manifest(command_line, config, inputs));
    std::cerr << "sweep: " << table.size() << " points; best p_all_sat=" << best.mean_all_sat
              << " mean_energy=" << best.mean_final_energy << "\n";
    return exit_ok;
}

int run_rerun(const std::string& manifest_path, const fs::path& out_dir,
              const std::string& command_line) {
    std::ifstream in(manifest_path);
    if (!in) throw CliError{exit_unreadable, "cannot read " + manifest_path};
    hoim::json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw CliError{exit_config, manifest_path + ": " + e.what()};
    }
    hoim::SolveConfig config;
    std::vector<std::string> inputs;
    try {
        config = hoim::solve_config_from_json(manifest.at("config"));
        for (const auto& entry : manifest.at("inputs")) {
            const std::string path = entry.at("path");
            const std::string digest = entry.at("fnv1a64");
            std::string actual;
            try {
                actual = hoim::digest_file(path);
            } catch (const std::runtime_error& e) {
                throw CliError{exit_unreadable, e.what()};
            }
            if (actual != digest)
                throw CliError{exit_config, path + ": digest mismatch (" + actual +
                                                " != " + digest + "); inputs changed since the run"};
            inputs.push_back(path);
        }
    } catch (const hoim::json::exception& e) {
        throw CliError{exit_config, manifest_path + ": " + e.what()};
    }
    if (config.trial.integrator.method != hoim::StepperKind::fixed_rk4)
        std::cerr << "note: manifest uses the adaptive integrator; rerun is statistical, "
                     "use rk4 for bit-identical results\n";
    return run_solve(inputs, config, out_dir, "", command_line);
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_sigint);
    CLI::App app{"coupled-oscillator Ising machine for SAT/MaxSAT"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run seeded solving trials on DIMACS instances");
    std::vector<std::string> solve_inputs;
    SolveFlags solve_flags;
    std::string solve_config_path, solve_out = ".", solve_trace;
    solve->add_option("inputs", solve_inputs, "DIMACS CNF files")->required();
    add_solve_flags(solve, solve_flags);
    solve->add_option("--config", solve_config_path, "JSON config (flags override it)");
    solve->add_option("--trace", solve_trace, "trajectory CSV of trial 0 on the first instance");
    solve->add_option("--out", solve_out, "output directory");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "reduce kSAT to 3SAT");
    std::string reduce_input, reduce_output, reduce_map;
    reduce->add_option("input", reduce_input, "DIMACS CNF file")->required();
    reduce->add_option("-o,--output", reduce_output, "3SAT DIMACS output")->required();
    reduce->add_option("--map", reduce_map, "variable-map JSON (default: <output>.map.json)");

    // quadratize
    auto* quad = app.add_subcommand("quadratize", "convert a 3SAT instance to a quadratic model");
    std::string quad_input, quad_output, quad_triples;
    quad->add_option("input", quad_input, "3SAT DIMACS file")->required();
    quad->add_option("-o,--output", quad_output, "model JSON (default: <stem>.quadratic.json)");
    quad->add_option("--triples", quad_triples, "also write `i j J` triples to this path");

    // resources
    auto* res = app.add_subcommand("resources", "count spins, connections and parameters");
    std::string res_input, res_scheme = "hub", res_order = "both", res_out;
    res->add_option("input", res_input, "DIMACS CNF file")->required();
    res->add_option("--scheme", res_scheme, "all-to-all | hub")
        ->check(CLI::IsMember({"all-to-all", "hub"}));
    res->add_option("--order", res_order, "higher | second | both")
        ->check(CLI::IsMember({"higher", "second", "both"}));
    res->add_option("--out", res_out, "write JSON here instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid-search oscillator parameters");
    std::vector<std::string> sweep_inputs;
    SolveFlags sweep_flags;
    std::string sweep_grid, sweep_config_path, sweep_out = ".";
    sweep->add_option("inputs", sweep_inputs, "DIMACS CNF files")->required();
    sweep->add_option("--grid", sweep_grid, "JSON map: parameter -> value list")->required();
    add_solve_flags(sweep, sweep_flags);
    sweep->add_option("--config", sweep_config_path, "JSON base config (flags override it)");
    sweep->add_option("--out", sweep_out, "output directory");

    // rerun
    auto* rerun = app.add_subcommand("rerun", "re-execute a solve run from its manifest");
    std::string rerun_manifest, rerun_out = "rerun";
    rerun->add_option("manifest", rerun_manifest, "run_manifest.json of a previous solve")
        ->required();
    rerun->add_option("--out", rerun_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    const std::string command_line = join_args(argc, argv);
    try {
        if (*solve) {
            hoim::SolveConfig config;
            if (!solve_config_path.empty()) config = load_config_file(solve_config_path);
            config = apply_flags(config, solve_flags);
            return run_solve(solve_inputs, config, solve_out, solve_trace, command_line);
        }
        if (*reduce) return run_reduce(reduce_input, reduce_output, reduce_map);
        if (*quad) return run_quadratize(quad_input, quad_output, quad_triples);
        if (*res) return run_resources(res_input, res_scheme, res_order, res_out);
        if (*sweep) {
            hoim::SolveConfig config;
            if (!sweep_config_path.empty()) config = load_config_file(sweep_config_path);
            config = apply_flags(config, sweep_flags);
            return run_sweep(sweep_inputs, sweep_grid, config, sweep_out, command_line);
        }
        if (*rerun) return run_rerun(rerun_manifest, rerun_out, command_line);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
