#pragma once

// Polynomial-time kSAT -> 3SAT reduction.
//
// A clause with k > 3 literals is split level by level: walking left to
// right, each consecutive pair (l1, l2) is replaced by a fresh auxiliary
// y and the clause (l1 v l2 v ~y) is emitted. The residual clause -- the
// new auxiliaries in creation order followed by the odd leftover literal,
// if any -- is emitted once it fits in 3 literals, otherwise it is split
// the same way. A 5-literal clause yields 3 clauses over 2 auxiliaries, a
// 7-literal clause 6 clauses over 5 auxiliaries.

#include <stdexcept>
#include <utility>
#include <vector>

#include "hoim/cnf.hpp"

namespace hoim {

struct ReductionMap {
    int original_vars = 0;
    int aux_vars = 0;
    // index of the input clause each output clause derives from
    std::vector<int> clause_provenance;
};

inline std::pair<CnfFormula, ReductionMap> reduce_to_3sat(const CnfFormula& input) {
    if (input.weighted)
        throw std::invalid_argument("reduce_to_3sat: weighted formulas are not supported");
    for (const Clause& c : input.clauses) {
        if (c.weight != 1.0)
            throw std::invalid_argument("reduce_to_3sat: weighted formulas are not supported");
        if (c.literals.empty())
            throw std::invalid_argument("reduce_to_3sat: empty clause");
    }

    CnfFormula out;
    ReductionMap map;
    map.original_vars = input.num_vars;
    int next_var = input.num_vars;  // fresh auxiliaries numbered after the originals

    for (size_t ci = 0; ci < input.clauses.size(); ++ci) {
        std::vector<Literal> work = input.clauses[ci].literals;
        while (work.size() > 3) {
            std::vector<Literal> residual;
            size_t i = 0;
            for (; i + 1 < work.size(); i += 2) {
                ++next_var;
                out.clauses.push_back(Clause{{work[i], work[i + 1], Literal{next_var, true}}, 1.0});
                map.clause_provenance.push_back(static_cast<int>(ci));
                residual.push_back(Literal{next_var, false});
            }
            if (i < work.size()) residual.push_back(work[i]);  // odd leftover
            work = std::move(residual);
        }
        out.clauses.push_back(Clause{std::move(work), 1.0});
        map.clause_provenance.push_back(static_cast<int>(ci));
    }

    map.aux_vars = next_var - input.num_vars;
    out.num_vars = next_var;
    out.weighted = false;
    return {std::move(out), std::move(map)};
}

}  // namespace hoim
