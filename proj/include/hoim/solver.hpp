#pragma once

// Seeded trials and batch experiments. A trial initializes every
// oscillator uniformly in a small complex disk, integrates the network
// over [0, t_end], binarizes by the sign of the real part at every
// accepted step to track time-to-solution, and scores the final state
// against the original formula's clause-violation count. Second-order
// machines run on the quadratized model but are read out and scored on
// the original variables only.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hoim/cnf.hpp"
#include "hoim/dynamics.hpp"
#include "hoim/energy.hpp"
#include "hoim/integrate.hpp"
#include "hoim/quadratic.hpp"

namespace hoim {

enum class MachineOrder { higher_order, second_order };

inline std::string to_string(MachineOrder m) {
    return m == MachineOrder::higher_order ? "higher" : "second";
}

struct TrialConfig {
    std::uint64_t seed = 0;
    OscillatorParams params;
    IntegratorConfig integrator;
    MachineOrder machine = MachineOrder::higher_order;
    double init_scale = 0.1;
};

inline void validate(const TrialConfig& c) {
    validate(c.params);
    validate(c.integrator);
    if (!(c.init_scale > 0)) throw std::invalid_argument("init_scale must be positive");
    if (c.machine == MachineOrder::second_order && c.params.exponent != 1)
        throw std::invalid_argument("second-order machine requires exponent 1");
}

struct TrialResult {
    double final_energy = 0.0;   // falsified-clause count of the original formula
    double frac_satisfied = 0.0;
    bool all_sat = false;
    std::optional<double> tts95;
    long long steps = 0;
    std::uint64_t seed = 0;
    IntegrationStatus status = IntegrationStatus::done;
    double wall_ms = 0.0;

    bool diverged() const { return status == IntegrationStatus::diverged; }
};

/// s_i = sign(Re z_i), with Re = 0 mapped to +1.
inline std::vector<int> binarize(std::span<const cplx> z) {
    std::vector<int> s(z.size());
    for (size_t i = 0; i < z.size(); ++i) s[i] = z[i].real() < 0.0 ? -1 : 1;
    return s;
}

/// Earliest sample time at or past the target fraction; no interpolation.
inline std::optional<double> tts_from_trace(std::span<const std::pair<double, double>> trace,
                                            double target) {
    for (size_t i = 1; i < trace.size(); ++i)
        if (trace[i].first < trace[i - 1].first) throw std::invalid_argument("unsorted trace");
    for (const auto& [t, frac] : trace)
        if (frac >= target) return t;
    return std::nullopt;
}

/// Formula plus the models a trial needs; built once per instance and
/// shared read-only across concurrent trials.
struct PreparedProblem {
    CnfFormula formula;
    HigherOrderEnergy scoring;  // exponent 1: exact violation counts on spins
    HigherOrderEnergy machine_energy;
    std::optional<QuadraticModel> quadratic;
    MachineOrder machine = MachineOrder::higher_order;

    int oscillator_count() const {
        return machine == MachineOrder::second_order ? quadratic->num_spins()
                                                     : machine_energy.num_vars();
    }
};

inline PreparedProblem prepare_problem(const CnfFormula& formula, const TrialConfig& config) {
    validate(config);
    PreparedProblem p{formula, build_energy(formula, 1), build_energy(formula, config.params.exponent),
                      std::nullopt, config.machine};
    if (config.machine == MachineOrder::second_order) {
        for (const Clause& c : formula.clauses)
            if (c.literals.size() > 3)
                throw std::invalid_argument(
                    "second-order machine needs a 3SAT formula; reduce it first");
        p.quadratic = quadratize_3sat(p.scoring);
    }
    return p;
}

namespace detail {

inline std::vector<cplx> initial_state(std::uint64_t seed, int count, double scale) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<cplx> z(static_cast<size_t>(count));
    for (cplx& v : z) {
        const double r = scale * std::sqrt(unif(gen));
        const double th = 2.0 * std::numbers::pi * unif(gen);
        v = cplx{r * std::cos(th), r * std::sin(th)};
    }
    return z;
}

template <GradientProvider Model>
TrialResult run_on_model(const PreparedProblem& problem, const Model& model,
                         const TrialConfig& config,
                         const std::function<void(double, std::span<const cplx>)>& trace) {
    const int n_vars = problem.formula.num_vars;
    const int m = static_cast<int>(problem.formula.clauses.size());
    NetworkRhs<Model> rhs(model, config.params);
    std::vector<cplx> z = initial_state(config.seed, rhs.dimension(), config.init_scale);

    TrialResult result;
    result.seed = config.seed;
    std::vector<int> spins(static_cast<size_t>(n_vars));
    auto observer = [&](double t, std::span<const cplx> state) {
        for (int i = 0; i < n_vars; ++i) spins[i] = state[i].real() < 0.0 ? -1 : 1;
        const int sat = count_satisfied(problem.formula, spins);
        if (!result.tts95 && m > 0 && static_cast<double>(sat) >= 0.95 * m) result.tts95 = t;
        if (trace) trace(t, state);
    };

    const auto t_start = std::chrono::steady_clock::now();
    IntegrationStats stats = integrate(rhs, z, 0.0, config.params.t_end, config.integrator, observer);
    const auto t_stop = std::chrono::steady_clock::now();

    result.wall_ms = std::chrono::duration<double, std::milli>(t_stop - t_start).count();
    result.steps = stats.accepted;
    result.status = stats.status;
    std::vector<int> final_spins = binarize(std::span<const cplx>(z).first(n_vars));
    result.final_energy = evaluate_spins(problem.scoring, final_spins);
    const int sat = count_satisfied(problem.formula, final_spins);
    result.frac_satisfied = m == 0 ? 1.0 : static_cast<double>(sat) / m;
    result.all_sat = sat == m;
    return result;
}

}  // namespace detail

inline TrialResult run_trial(const PreparedProblem& problem, const TrialConfig& config,
                             const std::function<void(double, std::span<const cplx>)>& trace = {}) {
    if (problem.machine == MachineOrder::second_order)
        return detail::run_on_model(problem, *problem.quadratic, config, trace);
    return detail::run_on_model(problem, problem.machine_energy, config, trace);
}

inline TrialResult run_trial(const CnfFormula& formula, const TrialConfig& config) {
    return run_trial(prepare_problem(formula, config), config);
}

struct InstanceAggregate {
    int trials = 0;
    int divergent = 0;
    double mean_final_energy = 0.0;
    double std_final_energy = 0.0;
    double mean_frac_satisfied = 0.0;
    double std_frac_satisfied = 0.0;
    double all_sat_probability = 0.0;
    std::optional<double> mean_tts95;
    std::optional<double> std_tts95;
    int tts95_count = 0;
};

struct BatchReport {
    std::vector<std::vector<TrialResult>> results;  // [instance][trial]
    std::vector<InstanceAggregate> aggregates;
};

namespace detail {

struct MeanStd {
    double mean = 0.0, std = 0.0;
};

// sample standard deviation, n-1 denominator
inline MeanStd mean_std(std::span<const double> xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - ms.mean) * (x - ms.mean);
        ms.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return ms;
}

inline InstanceAggregate aggregate_trials(std::span<const TrialResult> trials) {
    InstanceAggregate agg;
    agg.trials = static_cast<int>(trials.size());
    std::vector<double> energies, fracs, tts;
    int all_sat = 0;
    for (const TrialResult& r : trials) {
        if (r.diverged()) {
            ++agg.divergent;
            continue;  // excluded from means, still counted
        }
        energies.push_back(r.final_energy);
        fracs.push_back(r.frac_satisfied);
        if (r.all_sat) ++all_sat;
        if (r.tts95) tts.push_back(*r.tts95);
    }
    const MeanStd e = mean_std(energies), f = mean_std(fracs), t = mean_std(tts);
    agg.mean_final_energy = e.mean;
    agg.std_final_energy = e.std;
    agg.mean_frac_satisfied = f.mean;
    agg.std_frac_satisfied = f.std;
    agg.all_sat_probability =
        agg.trials == 0 ? 0.0 : static_cast<double>(all_sat) / static_cast<double>(agg.trials);
    agg.tts95_count = static_cast<int>(tts.size());
    if (!tts.empty()) {
        agg.mean_tts95 = t.mean;
        agg.std_tts95 = t.std;
    }
    return agg;
}

/// Runs fn(0..jobs-1) on `workers` threads; any thrown exception is
/// rethrown on the calling thread after the pool drains.
template <class Fn>
void run_jobs(size_t jobs, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || jobs <= 1) {
        for (size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    auto worker = [&] {
        for (;;) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs || failed.load()) return;
            try {
                fn(j);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace detail

/// Trial (i, j) uses seed  base + i*trials + j,  so results do not
/// depend on the worker count.
inline BatchReport run_batch(const std::vector<CnfFormula>& formulas, const TrialConfig& config,
                             int trials, int workers = 1) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    validate(config);
    std::vector<PreparedProblem> problems;
    problems.reserve(formulas.size());
    for (const CnfFormula& f : formulas) problems.push_back(prepare_problem(f, config));

    BatchReport report;
    report.results.assign(formulas.size(), std::vector<TrialResult>(static_cast<size_t>(trials)));
    detail::run_jobs(formulas.size() * static_cast<size_t>(trials), workers, [&](size_t job) {
        const size_t i = job / static_cast<size_t>(trials);
        const size_t j = job % static_cast<size_t>(trials);
        TrialConfig c = config;
        c.seed = config.seed + i * static_cast<std::uint64_t>(trials) + j;
        report.results[i][j] = run_trial(problems[i], c);
    });
    report.aggregates.reserve(formulas.size());
    for (const auto& rs : report.results)
        report.aggregates.push_back(detail::aggregate_trials(rs));
    return report;
}

struct SweepGrid {
    // empty axis: keep the base config's value
    std::vector<double> lambda, rho, q_max, coupling, t_end, init_scale;
};

struct SweepPoint {
    OscillatorParams params;
    double init_scale = 0.1;
    double mean_all_sat = 0.0;        // across instances
    double mean_final_energy = 0.0;   // across non-divergent trials
    double mean_frac_satisfied = 0.0;
    int divergent = 0;
};

/// Cartesian grid over the six swept parameters, ranked by all-SAT
/// probability (descending) then mean final energy (ascending). Ties
/// keep grid order; the winner is row 0.
inline std::vector<SweepPoint> parameter_sweep(const std::vector<CnfFormula>& formulas,
                                               const TrialConfig& base, const SweepGrid& grid,
                                               int trials, int workers = 1) {
    auto axis = [](const std::vector<double>& v, double fallback) {
        return v.empty() ? std::vector<double>{fallback} : v;
    };
    const auto lambdas = axis(grid.lambda, base.params.lambda);
    const auto rhos = axis(grid.rho, base.params.rho);
    const auto qs = axis(grid.q_max, base.params.q_max);
    const auto rs = axis(grid.coupling, base.params.coupling);
    const auto tends = axis(grid.t_end, base.params.t_end);
    const auto scales = axis(grid.init_scale, base.init_scale);

    std::vector<SweepPoint> table;
    for (double l : lambdas)
        for (double rho : rhos)
            for (double q : qs)
                for (double r : rs)
                    for (double te : tends)
                        for (double sc : scales) {
                            TrialConfig c = base;
                            c.params.lambda = l;
                            c.params.rho = rho;
                            c.params.q_max = q;
                            c.params.coupling = r;
                            c.params.t_end = te;
                            c.init_scale = sc;
                            BatchReport rep = run_batch(formulas, c, trials, workers);
                            SweepPoint pt;
                            pt.params = c.params;
                            pt.init_scale = sc;
                            double esum = 0.0, fsum = 0.0;
                            long long kept = 0;
                            for (const auto& inst : rep.results)
                                for (const TrialResult& t : inst) {
                                    if (t.diverged()) {
                                        ++pt.divergent;
                                        continue;
                                    }
                                    esum += t.final_energy;
                                    fsum += t.frac_satisfied;
                                    ++kept;
                                }
                            for (const InstanceAggregate& a : rep.aggregates)
                                pt.mean_all_sat += a.all_sat_probability;
                            pt.mean_all_sat /= static_cast<double>(rep.aggregates.size());
                            if (kept > 0) {
                                pt.mean_final_energy = esum / static_cast<double>(kept);
                                pt.mean_frac_satisfied = fsum / static_cast<double>(kept);
                            } else {
                                pt.mean_final_energy = std::numeric_limits<double>::infinity();
                            }
                            table.push_back(pt);
                        }
    std::stable_sort(table.begin(), table.end(), [](const SweepPoint& a, const SweepPoint& b) {
        if (a.mean_all_sat != b.mean_all_sat) return a.mean_all_sat > b.mean_all_sat;
        return a.mean_final_energy < b.mean_final_energy;
    });
    return table;
}

}  // namespace hoim
