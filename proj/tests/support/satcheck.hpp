#pragma once

// Brute-force satisfiability oracles for small formulas. Assignment
// masks map bit i to variable i+1, set bit = +1.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hoim/cnf.hpp"

namespace hoim_test {

inline std::vector<int> spins_from_mask(std::uint32_t mask, int n) {
    std::vector<int> s(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1 ? 1 : -1;
    return s;
}

inline int count_unsatisfied(const hoim::CnfFormula& f, const std::vector<int>& spins) {
    return static_cast<int>(f.clauses.size()) - hoim::count_satisfied(f, spins);
}

inline bool brute_force_satisfiable(const hoim::CnfFormula& f) {
    if (f.num_vars > 25) throw std::invalid_argument("too many variables for brute force");
    const std::uint32_t total = 1u << f.num_vars;
    for (std::uint32_t mask = 0; mask < total; ++mask)
        if (count_unsatisfied(f, spins_from_mask(mask, f.num_vars)) == 0) return true;
    return false;
}

}  // namespace hoim_test
