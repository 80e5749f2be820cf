#pragma once

// Experiment output: per-trial CSV rows, per-instance JSON aggregates
// (schema 1), solve-config JSON shared by sweep winners and manifests,
// and the run manifest itself (command line, config snapshot, FNV-1a
// digests of the inputs). Numbers round-trip at full precision so a
// fixed-step rerun can be compared byte for byte.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hoim/quadratic.hpp"
#include "hoim/reduce.hpp"
#include "hoim/resources.hpp"
#include "hoim/solver.hpp"

namespace hoim {

inline constexpr const char* version = "0.1.0";
inline constexpr int aggregates_schema = 1;

using json = nlohmann::json;

namespace detail {

inline std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// -------- digests --------

inline std::uint64_t fnv1a64(const void* data, size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64_hex(ss.str());
}

// -------- model serialization --------

inline json to_json(const QuadraticModel& m) {
    json couplings = json::array();
    for (const Coupling& c : m.couplings()) couplings.push_back({c.i, c.j, c.value});
    return json{{"spins", m.num_spins()},
                {"offset", m.offset()},
                {"biases", m.biases()},
                {"couplings", couplings}};
}

inline json to_json(const ResourceReport& r) {
    return json{{"scheme", r.scheme},
                {"spins", r.spins},
                {"connections", r.connections},
                {"parameters", r.parameters},
                {"coefficient_bits", r.coefficient_bits}};
}

inline json to_json(const ReductionMap& m) {
    return json{{"original_vars", m.original_vars},
                {"aux_vars", m.aux_vars},
                {"clause_provenance", m.clause_provenance}};
}

// -------- solve config --------

/// Everything a solve run needs besides the input paths; also the
/// payload of sweep winners and manifests.
struct SolveConfig {
    TrialConfig trial;
    int trials = 64;
    int workers = 1;
};

inline json to_json(const SolveConfig& c) {
    const OscillatorParams& p = c.trial.params;
    const IntegratorConfig& ic = c.trial.integrator;
    return json{
        {"order", to_string(c.trial.machine)},
        {"exponent", p.exponent},
        {"lambda", p.lambda},
        {"rho", p.rho},
        {"omega", p.omega},
        {"coupling", p.coupling},
        {"q_max", p.q_max},
        {"t_end", p.t_end},
        {"normalize", p.normalize},
        {"init_scale", c.trial.init_scale},
        {"seed", c.trial.seed},
        {"trials", c.trials},
        {"workers", c.workers},
        {"integrator",
         json{{"method", ic.method == StepperKind::adaptive_rk45 ? "rk45" : "rk4"},
              {"abs_tol", ic.abs_tol},
              {"rel_tol", ic.rel_tol},
              {"initial_step", ic.initial_step},
              {"max_step", ic.max_step},
              {"fixed_step", ic.fixed_step},
              {"max_steps", ic.max_steps}}}};
}

inline SolveConfig solve_config_from_json(const json& j) {
    SolveConfig c;
    OscillatorParams& p = c.trial.params;
    if (j.contains("order")) {
        const std::string order = j.at("order");
        if (order == "higher") c.trial.machine = MachineOrder::higher_order;
        else if (order == "second") c.trial.machine = MachineOrder::second_order;
        else throw std::invalid_argument("order must be 'higher' or 'second'");
    }
    p.exponent = j.value("exponent", p.exponent);
    p.lambda = j.value("lambda", p.lambda);
    p.rho = j.value("rho", p.rho);
    p.omega = j.value("omega", p.omega);
    p.coupling = j.value("coupling", p.coupling);
    p.q_max = j.value("q_max", p.q_max);
    p.t_end = j.value("t_end", p.t_end);
    p.normalize = j.value("normalize", p.normalize);
    c.trial.init_scale = j.value("init_scale", c.trial.init_scale);
    c.trial.seed = j.value("seed", c.trial.seed);
    c.trials = j.value("trials", c.trials);
    c.workers = j.value("workers", c.workers);
    if (j.contains("integrator")) {
        const json& ij = j.at("integrator");
        IntegratorConfig& ic = c.trial.integrator;
        if (ij.contains("method")) {
            const std::string m = ij.at("method");
            if (m == "rk45") ic.method = StepperKind::adaptive_rk45;
            else if (m == "rk4") ic.method = StepperKind::fixed_rk4;
            else throw std::invalid_argument("integrator method must be 'rk45' or 'rk4'");
        }
        ic.abs_tol = ij.value("abs_tol", ic.abs_tol);
        ic.rel_tol = ij.value("rel_tol", ic.rel_tol);
        ic.initial_step = ij.value("initial_step", ic.initial_step);
        ic.max_step = ij.value("max_step", ic.max_step);
        ic.fixed_step = ij.value("fixed_step", ic.fixed_step);
        ic.max_steps = ij.value("max_steps", ic.max_steps);
    }
    return c;
}

// -------- result tables --------

inline constexpr const char* results_csv_header =
    "instance,order,exponent,trial,seed,final_energy,frac_satisfied,all_sat,tts95,steps,status,"
    "wall_ms";

inline void write_result_row(std::ostream& out, const std::string& instance,
                             const TrialConfig& config, int trial, const TrialResult& r) {
    out << instance << ',' << to_string(config.machine) << ',' << config.params.exponent << ','
        << trial << ',' << r.seed << ',' << detail::full_precision(r.final_energy) << ','
        << detail::full_precision(r.frac_satisfied) << ',' << (r.all_sat ? 1 : 0) << ','
        << (r.tts95 ? detail::full_precision(*r.tts95) : std::string{}) << ',' << r.steps << ','
        << to_string(r.status) << ',' << detail::full_precision(r.wall_ms) << '\n';
}

inline json to_json(const InstanceAggregate& a) {
    json j{{"trials", a.trials},
           {"divergent", a.divergent},
           {"mean_final_energy", a.mean_final_energy},
           {"std_final_energy", a.std_final_energy},
           {"mean_frac_satisfied", a.mean_frac_satisfied},
           {"std_frac_satisfied", a.std_frac_satisfied},
           {"all_sat_probability", a.all_sat_probability},
           {"tts95_count", a.tts95_count}};
    j["mean_tts95"] = a.mean_tts95 ? json(*a.mean_tts95) : json(nullptr);
    j["std_tts95"] = a.std_tts95 ? json(*a.std_tts95) : json(nullptr);
    return j;
}

inline json aggregates_to_json(const std::vector<std::string>& names,
                               const std::vector<InstanceStats>& stats,
                               const std::vector<InstanceAggregate>& aggs,
                               const SolveConfig& config) {
    json instances = json::array();
    double mean_energy = 0.0, mean_frac = 0.0, mean_allsat = 0.0;
    for (size_t i = 0; i < aggs.size(); ++i) {
        json j = to_json(aggs[i]);
        j["instance"] = names[i];
        j["num_vars"] = stats[i].num_vars;
        j["num_clauses"] = stats[i].num_clauses;
        instances.push_back(std::move(j));
        mean_energy += aggs[i].mean_final_energy;
        mean_frac += aggs[i].mean_frac_satisfied;
        mean_allsat += aggs[i].all_sat_probability;
    }
    const double n = aggs.empty() ? 1.0 : static_cast<double>(aggs.size());
    return json{{"schema", aggregates_schema},
                {"config", to_json(config)},
                {"instances", instances},
                {"summary",
                 json{{"mean_final_energy", mean_energy / n},
                      {"mean_frac_satisfied", mean_frac / n},
                      {"mean_all_sat_probability", mean_allsat / n}}}};
}

// -------- manifest --------

inline std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json make_manifest(const std::string& command_line, const SolveConfig& config,
                          const std::vector<std::string>& input_paths) {
    json inputs = json::array();
    // absolute paths so a rerun resolves inputs from any working directory
    for (const std::string& path : input_paths)
        inputs.push_back({{"path", std::filesystem::absolute(path).string()},
                          {"fnv1a64", digest_file(path)}});
    return json{{"tool", "hoim"},
                {"version", version},
                {"timestamp", timestamp_utc()},
                {"command_line", command_line},
                {"config", to_json(config)},
                {"inputs", inputs}};
}

}  // namespace hoim
