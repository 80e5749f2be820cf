#pragma once

// Higher-order Ising energies over bipolar spins, kept in factored form:
// each constraint contributes product terms prod_i (1 + c_i*s_i)/2 that
// evaluate to 1 exactly on a designated state and 0 on every other
// bipolar state. A SAT clause maps to the single term that flags its
// all-literals-false assignment, so with unit weights the total energy
// on a bipolar state is the number of falsified clauses.
//
// Evaluation and differentiation accept real or complex states; the
// derivative is the formal polynomial derivative in each coordinate.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hoim/cnf.hpp"

namespace hoim {

using cplx = std::complex<double>;

/// Whether a term came from the characteristic function of invalid
/// states (positive weight) or the complement construction over valid
/// states (negative weight, with the leading constant folded into the
/// energy's constant offset).
enum class TermPolarity { invalid_states, valid_states };

struct ClauseTerm {
    std::vector<int> variables;   // 1-based, distinct
    std::vector<std::int8_t> signs;  // +/-1; the state where the product equals 1
    double weight = 1.0;          // signed; negative for valid-states terms
    TermPolarity polarity = TermPolarity::invalid_states;

    int order() const { return static_cast<int>(variables.size()); }
};

class HigherOrderEnergy {
public:
    HigherOrderEnergy(int num_vars, int exponent = 1)
        : num_vars_(num_vars), exponent_(exponent) {
        if (num_vars < 0) throw std::invalid_argument("negative variable count");
        if (exponent != 1 && exponent != 2)
            throw std::invalid_argument("exponent must be 1 or 2");
    }

    void add_term(ClauseTerm term) {
        if (term.variables.size() != term.signs.size())
            throw std::invalid_argument("sign/variable length mismatch");
        for (size_t i = 0; i < term.variables.size(); ++i) {
            int v = term.variables[i];
            if (v < 1 || v > num_vars_)
                throw std::invalid_argument("term variable out of range");
            if (term.signs[i] != 1 && term.signs[i] != -1)
                throw std::invalid_argument("term signs must be +/-1");
            for (size_t j = i + 1; j < term.variables.size(); ++j)
                if (term.variables[j] == v)
                    throw std::invalid_argument("duplicate variable in term");
        }
        terms_.push_back(std::move(term));
    }

    void add_constant(double c) { constant_ += c; }

    int num_vars() const { return num_vars_; }
    int exponent() const { return exponent_; }
    double constant() const { return constant_; }
    const std::vector<ClauseTerm>& terms() const { return terms_; }
    int max_order() const {
        int k = 0;
        for (const ClauseTerm& t : terms_) k = std::max(k, t.order());
        return k;
    }

private:
    int num_vars_;
    std::vector<ClauseTerm> terms_;
    double constant_ = 0.0;
    int exponent_;
};

inline int dimension(const HigherOrderEnergy& e) { return e.num_vars(); }

/// The factored term of an OR clause: value 1 exactly when every literal
/// is false. Under s = 2x - 1, a positive literal is false at s = -1, so
/// the stored sign is the negation of the literal's polarity sign.
inline ClauseTerm clause_term_from_clause(const Clause& clause) {
    if (clause.literals.empty()) throw std::invalid_argument("empty clause");
    if (clause.weight <= 0) throw std::invalid_argument("clause weight must be positive");
    ClauseTerm term;
    term.weight = clause.weight;
    term.polarity = TermPolarity::invalid_states;
    term.variables.reserve(clause.literals.size());
    term.signs.reserve(clause.literals.size());
    for (const Literal& l : clause.literals) {
        term.variables.push_back(l.variable);
        term.signs.push_back(l.negated ? +1 : -1);
    }
    return term;
}

struct TruthTableTerms {
    std::vector<ClauseTerm> terms;
    double constant = 0.0;
};

/// Constraint energy from an explicit truth table over `variables`.
/// polarity = invalid_states sums characteristic terms of the listed
/// states; polarity = valid_states emits weight minus that sum. Both
/// constructions agree on every bipolar state when built from
/// complementary sets.
inline TruthTableTerms terms_from_truth_table(std::span<const int> variables,
                                              const std::vector<std::vector<std::int8_t>>& states,
                                              TermPolarity polarity, double weight = 1.0) {
    if (states.empty()) throw std::invalid_argument("truth table needs at least one state");
    const size_t k = variables.size();
    for (const auto& st : states) {
        if (st.size() != k) throw std::invalid_argument("inconsistent state length");
        for (std::int8_t v : st)
            if (v != 1 && v != -1) throw std::invalid_argument("states must be bipolar");
    }
    for (size_t a = 0; a < states.size(); ++a)
        for (size_t b = a + 1; b < states.size(); ++b)
            if (states[a] == states[b]) throw std::invalid_argument("duplicate state in truth table");

    TruthTableTerms out;
    const double w = polarity == TermPolarity::invalid_states ? weight : -weight;
    if (polarity == TermPolarity::valid_states) out.constant = weight;
    for (const auto& st : states) {
        ClauseTerm t;
        t.variables.assign(variables.begin(), variables.end());
        t.signs = st;
        t.weight = w;
        t.polarity = polarity;
        out.terms.push_back(std::move(t));
    }
    return out;
}

/// One invalid-states term per clause.
inline HigherOrderEnergy build_energy(const CnfFormula& formula, int exponent = 1) {
    HigherOrderEnergy energy(formula.num_vars, exponent);
    for (const Clause& c : formula.clauses) energy.add_term(clause_term_from_clause(c));
    return energy;
}

namespace detail {

template <class Scalar>
inline Scalar term_product(const ClauseTerm& t, std::span<const Scalar> state) {
    Scalar p{1.0};
    for (size_t i = 0; i < t.variables.size(); ++i) {
        p *= (Scalar{1.0} + static_cast<double>(t.signs[i]) * state[t.variables[i] - 1]) * 0.5;
    }
    return p;
}

}  // namespace detail

/// Energy at a real or complex state vector (indexed so variable v is
/// state[v-1]).
template <class Scalar>
Scalar evaluate(const HigherOrderEnergy& e, std::span<const Scalar> state) {
    if (static_cast<int>(state.size()) != e.num_vars())
        throw std::invalid_argument("state dimension mismatch");
    Scalar total{e.constant()};
    for (const ClauseTerm& t : e.terms()) {
        Scalar p = detail::term_product(t, state);
        if (e.exponent() == 2) p *= p;
        total += t.weight * p;
    }
    return total;
}

inline double evaluate(const HigherOrderEnergy& e, const std::vector<double>& state) {
    return evaluate<double>(e, std::span<const double>(state));
}
inline cplx evaluate(const HigherOrderEnergy& e, const std::vector<cplx>& state) {
    return evaluate<cplx>(e, std::span<const cplx>(state));
}

/// Exact energy on a bipolar spin assignment: each product term is an
/// indicator (state equal to the term's sign vector), so with exponent 1
/// and unit weights this is the integer count of falsified clauses.
inline double evaluate_spins(const HigherOrderEnergy& e, std::span<const int> spins) {
    if (static_cast<int>(spins.size()) != e.num_vars())
        throw std::invalid_argument("state dimension mismatch");
    double total = e.constant();
    for (const ClauseTerm& t : e.terms()) {
        bool hit = true;
        for (size_t i = 0; i < t.variables.size() && hit; ++i)
            hit = spins[t.variables[i] - 1] == t.signs[i];
        if (hit) total += t.weight;  // indicator^p == indicator
    }
    return total;
}

/// Formal derivative dE/dz_i for every coordinate, accumulated into
/// `out` (which is zeroed first). Each term costs O(k) via prefix/suffix
/// hole products; with exponent 2 the chain rule contributes 2 * E_h(z).
template <class Scalar>
void gradient_into(const HigherOrderEnergy& e, std::span<const Scalar> z, std::span<Scalar> out) {
    if (static_cast<int>(z.size()) != e.num_vars() || out.size() != z.size())
        throw std::invalid_argument("state dimension mismatch");
    std::fill(out.begin(), out.end(), Scalar{0.0});

    thread_local std::vector<Scalar> factors, prefix;
    for (const ClauseTerm& t : e.terms()) {
        const size_t k = t.variables.size();
        factors.resize(k);
        prefix.resize(k + 1);
        prefix[0] = Scalar{1.0};
        for (size_t i = 0; i < k; ++i) {
            factors[i] = (Scalar{1.0} + static_cast<double>(t.signs[i]) * z[t.variables[i] - 1]) * 0.5;
            prefix[i + 1] = prefix[i] * factors[i];
        }
        Scalar outer{t.weight};
        if (e.exponent() == 2) outer *= 2.0 * prefix[k];
        Scalar suffix{1.0};
        for (size_t i = k; i-- > 0;) {
            // d/dz of (1 + c*z)/2 is c/2
            out[t.variables[i] - 1] += outer * (0.5 * static_cast<double>(t.signs[i])) * prefix[i] * suffix;
            suffix *= factors[i];
        }
    }
}

template <class Scalar>
std::vector<Scalar> gradient(const HigherOrderEnergy& e, std::span<const Scalar> z) {
    std::vector<Scalar> g(z.size());
    gradient_into(e, z, std::span<Scalar>(g));
    return g;
}

inline std::vector<cplx> gradient(const HigherOrderEnergy& e, const std::vector<cplx>& z) {
    return gradient<cplx>(e, std::span<const cplx>(z));
}
inline std::vector<double> gradient(const HigherOrderEnergy& e, const std::vector<double>& z) {
    return gradient<double>(e, std::span<const double>(z));
}

}  // namespace hoim
