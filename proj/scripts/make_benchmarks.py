#!/usr/bin/env python3
"""Regenerate the benchmark instances under data/.

Uniform random kSAT instances in the style of the SATLIB uf* families:
every clause has exactly k distinct variables with random polarities, and
every emitted instance is verified satisfiable by the DPLL check below.
Generation is fully seeded, so rerunning this script reproduces the
checked-in files byte for byte.

Usage: python3 scripts/make_benchmarks.py [--check]
"""

import argparse
import os
import random
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
MASTER_SEED = 987654321


def random_formula(rng, n, m, k):
    seen = set()
    clauses = []
    while len(clauses) < m:
        vs = rng.sample(range(1, n + 1), k)
        c = tuple(v if rng.random() < 0.5 else -v for v in vs)
        key = tuple(sorted(c, key=abs))
        if key in seen:
            continue
        seen.add(key)
        clauses.append(c)
    return clauses


def dpll(clauses):
    """Returns a set of true literals satisfying the formula, or None."""

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if -lit in c:
                c2 = tuple(l for l in c if l != -lit)
                if not c2:
                    return None
                out.append(c2)
            else:
                out.append(c)
        return out

    def solve(cls, assign):
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is None:
                break
            cls = simplify(cls, unit)
            if cls is None:
                return None
            assign = assign | {unit}
        if not cls:
            return assign
        branch = min(cls, key=len)[0]
        for lit in (branch, -branch):
            nxt = simplify(cls, lit)
            if nxt is None:
                continue
            r = solve(nxt, assign | {lit})
            if r is not None:
                return r
        return None

    sys.setrecursionlimit(100000)
    return solve([tuple(c) for c in clauses], frozenset())


def check_assignment(clauses, truelits):
    return all(any(l in truelits for l in c) for c in clauses)


def write_dimacs(path, clauses, n, family, seed):
    with open(path, "w") as f:
        f.write(f"c {os.path.basename(path)}\n")
        f.write(f"c uniform random {family}, generator seed {seed}\n")
        f.write(f"p cnf {n} {len(clauses)}\n")
        for c in clauses:
            f.write(" ".join(str(l) for l in c) + " 0\n")
        f.write("%\n0\n")


def make_family(subdir, prefix, count, n, m, k, base_seed):
    os.makedirs(os.path.join(ROOT, subdir), exist_ok=True)
    made = 0
    attempt = 0
    while made < count:
        seed = base_seed + attempt
        attempt += 1
        rng = random.Random(seed)
        clauses = random_formula(rng, n, m, k)
        model = dpll(clauses)
        if model is None:
            continue
        full = set(model) | {v for v in range(1, n + 1)
                             if v not in model and -v not in model}
        assert check_assignment(clauses, full)
        made += 1
        name = f"{prefix}-{made:02d}.cnf"
        write_dimacs(os.path.join(ROOT, subdir, name), clauses, n,
                     f"{k}SAT n={n} m={m}", seed)
        print(f"wrote {subdir}/{name} (seed {seed})")


def read_dimacs(path):
    clauses = []
    cur = []
    for line in open(path):
        t = line.split()
        if not t or t[0] in ("c", "p"):
            continue
        if t[0] == "%":
            break
        for tok in t:
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    return clauses


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true",
                    help="verify satisfiability of the files already on disk")
    args = ap.parse_args()
    if args.check:
        ok = True
        for sub in sorted(os.listdir(ROOT)):
            d = os.path.join(ROOT, sub)
            if not os.path.isdir(d):
                continue
            for name in sorted(os.listdir(d)):
                sat = dpll(read_dimacs(os.path.join(d, name))) is not None
                ok = ok and sat
                print(f"{sub}/{name}: {'sat' if sat else 'UNSAT?!'}")
        sys.exit(0 if ok else 1)

    make_family("uf20", "uf20", 16, n=20, m=91, k=3, base_seed=MASTER_SEED)
    make_family("uf50", "uf50", 8, n=50, m=218, k=3, base_seed=MASTER_SEED + 1000)
    make_family("ksat", "k5-v50", 1, n=50, m=400, k=5, base_seed=MASTER_SEED + 2000)
    make_family("ksat", "k7-v40", 1, n=40, m=280, k=7, base_seed=MASTER_SEED + 3000)


if __name__ == "__main__":
    main()
