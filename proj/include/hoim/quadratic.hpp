#pragma once

// Second-order Ising baseline: biases, pairwise couplings, constant
// offset over original + auxiliary spins. 3-literal clause penalties are
// replaced by the one-auxiliary quadratic form
//     1 - sum t_i + sum_{i<j} t_i t_j + w (2 - sum t_i)
// in Boolean literal truths t_i and auxiliary w, which has the same
// minimum over w as the cubic penalty at every assignment and leaves a
// gap of exactly 1 to the lowest unsatisfied configuration. All spin
// coefficients are integer multiples of 1/4 times the clause weight, so
// unit-weight gadget checks compare exactly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoim/energy.hpp"

namespace hoim {

struct Coupling {
    int i = 0, j = 0;  // 1-based spins, i < j
    double value = 0.0;
};

class QuadraticModel {
public:
    explicit QuadraticModel(int num_spins, int num_original = -1)
        : num_spins_(num_spins),
          num_original_(num_original < 0 ? num_spins : num_original),
          biases_(static_cast<size_t>(num_spins), 0.0) {
        if (num_spins < 0) throw std::invalid_argument("negative spin count");
        if (num_original_ > num_spins_) throw std::invalid_argument("more originals than spins");
    }

    void add_offset(double c) { offset_ += c; }

    void add_bias(int spin, double h) {
        check_spin(spin);
        biases_[spin - 1] += h;
    }

    void add_coupling(int i, int j, double value) {
        check_spin(i);
        check_spin(j);
        if (i == j) throw std::invalid_argument("self-coupling");
        if (i > j) std::swap(i, j);
        auto it = std::lower_bound(couplings_.begin(), couplings_.end(), std::pair{i, j},
                                   [](const Coupling& c, const std::pair<int, int>& key) {
                                       return std::pair{c.i, c.j} < key;
                                   });
        if (it != couplings_.end() && it->i == i && it->j == j) it->value += value;
        else couplings_.insert(it, Coupling{i, j, value});
    }

    int num_spins() const { return num_spins_; }
    int num_original() const { return num_original_; }
    double offset() const { return offset_; }
    const std::vector<double>& biases() const { return biases_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }

    /// term index -> 1-based auxiliary spin, or -1 when the term needed none
    const std::vector<int>& aux_map() const { return aux_map_; }
    std::vector<int>& aux_map() { return aux_map_; }

private:
    void check_spin(int s) const {
        if (s < 1 || s > num_spins_) throw std::invalid_argument("spin index out of range");
    }

    int num_spins_;
    int num_original_;
    double offset_ = 0.0;
    std::vector<double> biases_;
    std::vector<Coupling> couplings_;  // sorted by (i, j), unique
    std::vector<int> aux_map_;
};

inline int dimension(const QuadraticModel& m) { return m.num_spins(); }

/// offset + sum h_i z_i + sum_{i<j} J_ij z_i z_j
template <class Scalar>
Scalar evaluate(const QuadraticModel& m, std::span<const Scalar> state) {
    if (static_cast<int>(state.size()) != m.num_spins())
        throw std::invalid_argument("state dimension mismatch");
    Scalar total{m.offset()};
    const auto& h = m.biases();
    for (size_t i = 0; i < h.size(); ++i) total += h[i] * state[i];
    for (const Coupling& c : m.couplings()) total += c.value * state[c.i - 1] * state[c.j - 1];
    return total;
}

inline double evaluate(const QuadraticModel& m, const std::vector<double>& state) {
    return evaluate<double>(m, std::span<const double>(state));
}
inline cplx evaluate(const QuadraticModel& m, const std::vector<cplx>& state) {
    return evaluate<cplx>(m, std::span<const cplx>(state));
}

inline double evaluate_spins(const QuadraticModel& m, std::span<const int> spins) {
    if (static_cast<int>(spins.size()) != m.num_spins())
        throw std::invalid_argument("state dimension mismatch");
    double total = m.offset();
    const auto& h = m.biases();
    for (size_t i = 0; i < h.size(); ++i) total += h[i] * spins[i];
    for (const Coupling& c : m.couplings())
        total += c.value * (spins[c.i - 1] * spins[c.j - 1]);
    return total;
}

/// component i: h_i + sum_j J_ij z_j
template <class Scalar>
void gradient_into(const QuadraticModel& m, std::span<const Scalar> z, std::span<Scalar> out) {
    if (static_cast<int>(z.size()) != m.num_spins() || out.size() != z.size())
        throw std::invalid_argument("state dimension mismatch");
    const auto& h = m.biases();
    for (size_t i = 0; i < h.size(); ++i) out[i] = Scalar{h[i]};
    for (const Coupling& c : m.couplings()) {
        out[c.i - 1] += c.value * z[c.j - 1];
        out[c.j - 1] += c.value * z[c.i - 1];
    }
}

template <class Scalar>
std::vector<Scalar> gradient(const QuadraticModel& m, std::span<const Scalar> z) {
    std::vector<Scalar> g(z.size());
    gradient_into(m, z, std::span<Scalar>(g));
    return g;
}

inline std::vector<cplx> gradient(const QuadraticModel& m, const std::vector<cplx>& z) {
    return gradient<cplx>(m, std::span<const cplx>(z));
}

namespace detail {

/// Adds one clause-term gadget. Spins u_i = c_i s_i (c from the term's
/// sign vector) make the literal truth t_i = (1 - u_i)/2; the quadratic
/// Boolean form above then expands to
///     w/2 + (w/4) sum u_i + (w/4) sum_{i<j} u_i u_j
///         + (w/4) s_a + (w/4) s_a sum u_i
/// for 3-terms, while 1- and 2-terms expand their product directly.
inline void add_term_gadget(QuadraticModel& model, const ClauseTerm& term, int aux_spin) {
    const double w = term.weight;
    const auto& v = term.variables;
    const auto& c = term.signs;
    switch (term.order()) {
        case 1:
            model.add_offset(w * 0.5);
            model.add_bias(v[0], w * 0.5 * c[0]);
            break;
        case 2:
            model.add_offset(w * 0.25);
            model.add_bias(v[0], w * 0.25 * c[0]);
            model.add_bias(v[1], w * 0.25 * c[1]);
            model.add_coupling(v[0], v[1], w * 0.25 * c[0] * c[1]);
            break;
        case 3:
            model.add_offset(w * 0.5);
            for (int i = 0; i < 3; ++i) {
                model.add_bias(v[i], w * 0.25 * c[i]);
                model.add_coupling(v[i], aux_spin, w * 0.25 * c[i]);
                for (int j = i + 1; j < 3; ++j)
                    model.add_coupling(v[i], v[j], w * 0.25 * c[i] * c[j]);
            }
            model.add_bias(aux_spin, w * 0.25);
            break;
        default:
            throw std::invalid_argument("term order above 3");
    }
}

}  // namespace detail

/// One fresh auxiliary spin per 3-variable term, none for shorter terms.
/// Auxiliaries are numbered after the original spins in term order.
inline QuadraticModel quadratize_3sat(const HigherOrderEnergy& energy) {
    if (energy.exponent() != 1)
        throw std::invalid_argument("quadratization requires exponent 1");
    int num_aux = 0;
    for (const ClauseTerm& t : energy.terms()) {
        if (t.order() > 3) throw std::invalid_argument("term order above 3");
        if (t.order() == 0) throw std::invalid_argument("empty term");
        if (t.weight <= 0.0 || t.polarity != TermPolarity::invalid_states)
            throw std::invalid_argument("gadget needs positive invalid-states terms");
        if (t.order() == 3) ++num_aux;
    }
    QuadraticModel model(energy.num_vars() + num_aux, energy.num_vars());
    model.add_offset(energy.constant());
    int next_aux = energy.num_vars();
    for (const ClauseTerm& t : energy.terms()) {
        int aux = t.order() == 3 ? ++next_aux : -1;
        detail::add_term_gadget(model, t, aux);
        model.aux_map().push_back(aux);
    }
    return model;
}

struct VerificationReport {
    bool marginals_match = false;
    double min_gap = 0.0;   // lowest unsatisfied energy minus lowest satisfied
    bool passed = false;    // marginals_match and min_gap == clause weight
    std::string detail;
};

/// Exhaustively checks a single-clause model: for every assignment of
/// the original spins the minimum over auxiliaries must equal the clause
/// penalty, and the lowest unsatisfied full configuration must sit
/// exactly one clause weight above the satisfied ground states.
inline VerificationReport verify_gadget(const Clause& clause, const QuadraticModel& model) {
    if (clause.literals.empty() || clause.literals.size() > 3)
        throw std::invalid_argument("gadget verification covers 1..3 literal clauses");
    const int n = model.num_original();
    const int a = model.num_spins() - n;
    if (n > 20 || a > 10) throw std::invalid_argument("model too large for exhaustive check");
    for (const Literal& l : clause.literals)
        if (l.variable > n) throw std::invalid_argument("clause variable outside original spins");

    VerificationReport report;
    report.marginals_match = true;
    double best_sat = std::numeric_limits<double>::infinity();
    double best_unsat = std::numeric_limits<double>::infinity();
    std::vector<int> spins(static_cast<size_t>(model.num_spins()), 1);
    for (std::uint32_t orig = 0; orig < (1u << n); ++orig) {
        for (int i = 0; i < n; ++i) spins[i] = (orig >> i) & 1 ? 1 : -1;
        const bool sat = clause_satisfied(clause, std::span<const int>(spins.data(), n));
        const double penalty = sat ? 0.0 : clause.weight;
        double marginal = std::numeric_limits<double>::infinity();
        for (std::uint32_t ax = 0; ax < (1u << a); ++ax) {
            for (int i = 0; i < a; ++i) spins[n + i] = (ax >> i) & 1 ? 1 : -1;
            const double e = evaluate_spins(model, spins);
            marginal = std::min(marginal, e);
            (sat ? best_sat : best_unsat) = std::min(sat ? best_sat : best_unsat, e);
        }
        if (marginal != penalty) {
            report.marginals_match = false;
            report.detail += "marginal " + std::to_string(marginal) + " vs penalty " +
                             std::to_string(penalty) + " at state " + std::to_string(orig) + "; ";
        }
    }
    report.min_gap = best_unsat - best_sat;
    report.passed = report.marginals_match && report.min_gap == clause.weight;
    if (report.min_gap != clause.weight)
        report.detail += "gap " + std::to_string(report.min_gap) + " expected " +
                         std::to_string(clause.weight) + "; ";
    return report;
}

/// `i j J` rows, biases as `i i h`, offset as a leading comment.
inline void write_triples(const QuadraticModel& model, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "# ising model: " << model.num_spins() << " spins, offset " << model.offset() << "\n";
    const auto& h = model.biases();
    for (size_t i = 0; i < h.size(); ++i)
        if (h[i] != 0.0) out << (i + 1) << ' ' << (i + 1) << ' ' << h[i] << '\n';
    for (const Coupling& c : model.couplings())
        if (c.value != 0.0) out << c.i << ' ' << c.j << ' ' << c.value << '\n';
    out.precision(old_precision);
}

}  // namespace hoim
