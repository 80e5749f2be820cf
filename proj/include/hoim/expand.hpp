#pragma once

// Multilinear expansion of a factored energy into explicit monomials
// J_S * prod_{v in S} s_v. Expanding a k-variable term enumerates its
// 2^k subsets, so this is a diagnostic for small orders, not a solver
// path. Exponent-2 energies are not multilinear and are rejected.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "hoim/energy.hpp"

namespace hoim {

struct MonomialPoly {
    int num_vars = 0;
    // key: sorted distinct 1-based variables; empty key is the constant
    std::map<std::vector<int>, double> coefficients;
};

/// Expand prod_i (1 + c_i s_i)/2 per term: the subset A contributes
/// (w / 2^k) * prod_{i in A} c_i on the monomial over A's variables.
/// Exact-zero coefficients are dropped.
inline MonomialPoly expand(const HigherOrderEnergy& e) {
    if (e.exponent() != 1)
        throw std::invalid_argument("expansion requires exponent 1");
    MonomialPoly poly;
    poly.num_vars = e.num_vars();
    if (e.constant() != 0.0) poly.coefficients[{}] = e.constant();

    std::vector<int> order;        // term-local indices sorted by variable
    std::vector<int> vars_sorted;  // monomial key scratch
    for (const ClauseTerm& t : e.terms()) {
        const int k = t.order();
        if (k > 30) throw std::invalid_argument("term order too large to expand");
        order.resize(k);
        for (int i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return t.variables[a] < t.variables[b]; });
        const double base = t.weight / std::ldexp(1.0, k);
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            double coeff = base;
            vars_sorted.clear();
            for (int i = 0; i < k; ++i) {
                if (mask & (1u << i)) {
                    coeff *= static_cast<double>(t.signs[order[i]]);
                    vars_sorted.push_back(t.variables[order[i]]);
                }
            }
            poly.coefficients[vars_sorted] += coeff;
        }
    }
    for (auto it = poly.coefficients.begin(); it != poly.coefficients.end();) {
        if (it->second == 0.0) it = poly.coefficients.erase(it);
        else ++it;
    }
    return poly;
}

inline double evaluate(const MonomialPoly& poly, std::span<const int> spins) {
    if (static_cast<int>(spins.size()) != poly.num_vars)
        throw std::invalid_argument("state dimension mismatch");
    double total = 0.0;
    for (const auto& [vars, coeff] : poly.coefficients) {
        double m = coeff;
        for (int v : vars) m *= static_cast<double>(spins[v - 1]);
        total += m;
    }
    return total;
}

}  // namespace hoim
