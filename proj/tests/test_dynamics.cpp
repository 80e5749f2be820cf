#include <catch2/catch_amalgamated.hpp>

#include "hoim/dynamics.hpp"
#include "hoim/integrate.hpp"

using namespace hoim;

namespace {

HigherOrderEnergy free_energy(int n) { return HigherOrderEnergy(n, 1); }

OscillatorParams defaults() { return OscillatorParams{}; }

}  // namespace

TEST_CASE("hopf vector field fixed points and growth") {
    OscillatorParams p = defaults();
    REQUIRE(hopf_rhs(cplx{0.0}, p) == cplx{0.0});
    REQUIRE(hopf_rhs(cplx{1.0}, p) == cplx{0.0});  // unit limit cycle
    REQUIRE(hopf_rhs(cplx{0.5}, p) == cplx{0.375});

    p.rho = -1.0;  // sign convention: magnitude is what matters
    REQUIRE(hopf_rhs(cplx{1.0}, p) == cplx{0.0});
    p.rho = 1.0;
    p.omega = 2.0;
    REQUIRE(hopf_rhs(cplx{0.0, 1.0}, p).real() == -2.0);
}

TEST_CASE("injection locking signal is conjugation") {
    REQUIRE(shil_term(cplx{0.0, 1.0}) == cplx{0.0, -1.0});
    REQUIRE(shil_term(cplx{1.0}) == cplx{1.0});
}

TEST_CASE("annealing schedule ramps linearly and clamps") {
    OscillatorParams p = defaults();
    p.q_max = 2.0;
    p.t_end = 4.0;
    REQUIRE(schedule_q(0.0, p) == 0.0);
    REQUIRE(schedule_q(2.0, p) == 1.0);
    REQUIRE(schedule_q(4.0, p) == 2.0);
    REQUIRE(schedule_q(9.0, p) == 2.0);
}

TEST_CASE("uncoupled unlocked network reduces to independent hopf flows") {
    HigherOrderEnergy e = free_energy(3);
    OscillatorParams p = defaults();
    p.coupling = 0.0;
    p.q_max = 0.0;
    OscillatorState s{{cplx{0.5}, cplx{0.0, 0.25}, cplx{-1.0}}, 0.7};
    std::vector<cplx> dz = system_rhs(s, e, p);
    for (size_t i = 0; i < s.z.size(); ++i) REQUIRE(dz[i] == hopf_rhs(s.z[i], p));
}

TEST_CASE("unit clause drives its oscillator toward the satisfying sign") {
    // clause (x1): E = (1 - z)/2, so -r dE/dz = +r/2 regardless of z
    CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorParams p = defaults();
    p.coupling = 0.8;
    p.q_max = 0.0;
    OscillatorState s{{cplx{0.3}}, 0.0};
    std::vector<cplx> dz = system_rhs(s, e, p);
    const cplx local = hopf_rhs(s.z[0], p);
    REQUIRE_THAT((dz[0] - local).real(), Catch::Matchers::WithinAbs(0.4, 1e-15));
    REQUIRE(dz[0].imag() == 0.0);
}

TEST_CASE("real states stay real: the field is conjugate-symmetric") {
    CnfFormula f = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorParams p = defaults();
    p.q_max = 1.5;
    OscillatorState s{{cplx{0.4}, cplx{-0.2}, cplx{0.9}}, 1.0};
    for (const cplx& d : system_rhs(s, e, p)) REQUIRE(d.imag() == 0.0);
}

TEST_CASE("negating the state and flipping every term sign negates the field") {
    CnfFormula f = parse_dimacs("p cnf 3 3\n1 2 0\n-2 3 0\n-1 -3 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    HigherOrderEnergy flipped(e.num_vars(), e.exponent());
    for (ClauseTerm t : e.terms()) {
        for (std::int8_t& s : t.signs) s = static_cast<std::int8_t>(-s);
        flipped.add_term(std::move(t));
    }
    OscillatorParams p = defaults();
    p.q_max = 0.7;
    for (bool normalize : {false, true}) {
        p.normalize = normalize;
        OscillatorState s{{cplx{0.4, 0.1}, cplx{-0.2, 0.3}, cplx{0.6, -0.5}}, 0.9};
        OscillatorState neg{{-s.z[0], -s.z[1], -s.z[2]}, 0.9};
        std::vector<cplx> fwd = system_rhs(s, e, p);
        std::vector<cplx> bwd = system_rhs(neg, flipped, p);
        for (size_t i = 0; i < fwd.size(); ++i) {
            REQUIRE_THAT(std::abs(bwd[i] + fwd[i]), Catch::Matchers::WithinAbs(0.0, 1e-15));
        }
    }
}

TEST_CASE("normalization evaluates the gradient on the unit circle, zeros excluded") {
    CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorParams p = defaults();
    p.normalize = true;
    p.q_max = 0.0;
    p.coupling = 1.0;

    OscillatorState scaled{{cplx{0.0, 0.2}, cplx{-0.3}}, 0.0};
    OscillatorState unit{{cplx{0.0, 1.0}, cplx{-1.0}}, 0.0};
    std::vector<cplx> grad_unit = gradient(e, unit.z);
    std::vector<cplx> dz = system_rhs(scaled, e, p);
    for (size_t i = 0; i < dz.size(); ++i)
        REQUIRE(dz[i] == hopf_rhs(scaled.z[i], p) - grad_unit[i]);

    // a zero-amplitude component contributes no gradient argument
    OscillatorState with_zero{{cplx{0.0}, cplx{0.5}}, 0.0};
    std::vector<cplx> at_zero = system_rhs(with_zero, e, p);
    std::vector<cplx> arg{cplx{0.0}, cplx{1.0}};
    std::vector<cplx> grad_partial = gradient(e, arg);
    REQUIRE(at_zero[0] == hopf_rhs(cplx{0.0}, p) - grad_partial[0]);
}

TEST_CASE("an isolated locked oscillator settles on the real axis, symmetrically") {
    HigherOrderEnergy e = free_energy(1);
    OscillatorParams p = defaults();
    p.coupling = 0.0;
    p.q_max = 1.0;
    p.t_end = 1.0;  // q saturates quickly, then holds
    IntegratorConfig ic;
    NetworkRhs rhs(e, p);

    std::vector<cplx> z{cplx{0.1, 0.3}};
    integrate(rhs, z, 0.0, 25.0, ic);
    const double locked = std::sqrt((p.lambda + p.q_max) / p.rho);
    REQUIRE_THAT(z[0].real(), Catch::Matchers::WithinAbs(locked, 1e-5));
    REQUIRE_THAT(z[0].imag(), Catch::Matchers::WithinAbs(0.0, 1e-5));

    std::vector<cplx> zneg{-cplx{0.1, 0.3}};
    integrate(rhs, zneg, 0.0, 25.0, ic);
    REQUIRE_THAT(zneg[0].real(), Catch::Matchers::WithinAbs(-locked, 1e-5));
}

TEST_CASE("parameter validation rejects out-of-range values") {
    OscillatorParams p = defaults();
    p.lambda = 0.0;
    REQUIRE_THROWS_AS(validate(p), std::invalid_argument);
    p = defaults();
    p.t_end = 0.0;
    REQUIRE_THROWS_AS(validate(p), std::invalid_argument);
    p = defaults();
    p.coupling = -0.1;
    REQUIRE_THROWS_AS(validate(p), std::invalid_argument);
    p = defaults();
    p.exponent = 3;
    REQUIRE_THROWS_AS(validate(p), std::invalid_argument);

    CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorState s{{cplx{0.0}}, 0.0};  // wrong dimension
    REQUIRE_THROWS_AS(system_rhs(s, e, defaults()), std::invalid_argument);
}
