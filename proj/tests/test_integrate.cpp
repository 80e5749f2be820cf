#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hoim/dynamics.hpp"
#include "hoim/integrate.hpp"

using namespace hoim;

namespace {

// exact amplitude of r' = r - r^3 started from r0
double hopf_radius(double r0, double t) {
    const double a = (1.0 / (r0 * r0) - 1.0) * std::exp(-2.0 * t);
    return 1.0 / std::sqrt(1.0 + a);
}

struct Decay {  // z' = -z
    void operator()(double, std::span<const cplx> z, std::span<cplx> dz) const {
        for (size_t i = 0; i < z.size(); ++i) dz[i] = -z[i];
    }
};

}  // namespace

TEST_CASE("adaptive integrator reaches the hopf limit cycle") {
    HigherOrderEnergy e(1, 1);
    OscillatorParams p;
    p.coupling = 0.0;
    p.q_max = 0.0;
    NetworkRhs rhs(e, p);
    IntegratorConfig cfg;

    std::vector<cplx> z{cplx{0.1}};
    IntegrationStats st = integrate(rhs, z, 0.0, 20.0, cfg);
    REQUIRE(st.status == IntegrationStatus::done);
    REQUIRE_THAT(std::abs(z[0]), Catch::Matchers::WithinAbs(1.0, 1e-6));
    REQUIRE_THAT(std::abs(z[0]), Catch::Matchers::WithinAbs(hopf_radius(0.1, 20.0), 1e-6));
    REQUIRE(st.accepted > 0);
    REQUIRE(st.t_final == 20.0);
}

TEST_CASE("linear decay matches the closed form") {
    IntegratorConfig cfg;
    cfg.abs_tol = 1e-10;
    cfg.rel_tol = 1e-10;
    std::vector<cplx> z{cplx{1.0}, cplx{0.0, 2.0}};
    IntegrationStats st = integrate(Decay{}, z, 0.0, 1.0, cfg);
    REQUIRE(st.status == IntegrationStatus::done);
    REQUIRE_THAT(z[0].real(), Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-9));
    REQUIRE_THAT(z[1].imag(), Catch::Matchers::WithinAbs(2.0 * std::exp(-1.0), 1e-9));
}

TEST_CASE("fixed-step method is bitwise deterministic") {
    CnfFormula f = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorParams p;
    NetworkRhs rhs(e, p);
    IntegratorConfig cfg;
    cfg.method = StepperKind::fixed_rk4;
    cfg.fixed_step = 1e-2;

    std::vector<cplx> a{cplx{0.05, 0.02}, cplx{-0.03, 0.01}, cplx{0.04, -0.06}};
    std::vector<cplx> b = a;
    IntegrationStats sa = integrate(rhs, a, 0.0, 8.0, cfg);
    IntegrationStats sb = integrate(rhs, b, 0.0, 8.0, cfg);
    REQUIRE(sa.status == IntegrationStatus::done);
    REQUIRE(sa.accepted == sb.accepted);
    REQUIRE(a == b);
    REQUIRE(sa.accepted == 800);
}

TEST_CASE("adaptive and fixed stepping agree on a coupled network") {
    CnfFormula f = parse_dimacs(
        "p cnf 10 6\n1 -2 3 0\n-3 4 5 0\n-5 6 0\n7 -8 0\n-7 9 10 0\n-1 -9 0\n");
    HigherOrderEnergy e = build_energy(f, 1);
    OscillatorParams p;
    NetworkRhs rhs(e, p);

    std::vector<cplx> start;
    for (int i = 0; i < 10; ++i)
        start.emplace_back(0.01 * (i + 1) * (i % 2 ? -1 : 1), 0.005 * (10 - i));

    std::vector<cplx> za = start;
    IntegratorConfig ca;  // adaptive with defaults
    integrate(rhs, za, 0.0, 8.0, ca);

    std::vector<cplx> zf = start;
    IntegratorConfig cf;
    cf.method = StepperKind::fixed_rk4;
    cf.fixed_step = 1e-3;
    integrate(rhs, zf, 0.0, 8.0, cf);

    for (size_t i = 0; i < za.size(); ++i)
        REQUIRE_THAT(std::abs(za[i] - zf[i]), Catch::Matchers::WithinAbs(0.0, 10 * ca.rel_tol));
}

TEST_CASE("divergent trajectories are detected and reported") {
    auto blowup = [](double, std::span<const cplx> z, std::span<cplx> dz) {
        for (size_t i = 0; i < z.size(); ++i) dz[i] = 10.0 * z[i];
    };
    std::vector<cplx> z{cplx{1.0}};
    IntegratorConfig cfg;
    IntegrationStats st = integrate(blowup, z, 0.0, 5.0, cfg);
    REQUIRE(st.status == IntegrationStatus::diverged);
    REQUIRE(st.t_final < 5.0);
}

TEST_CASE("step budget exhaustion stops the run") {
    HigherOrderEnergy e(1, 1);
    OscillatorParams p;
    NetworkRhs rhs(e, p);
    IntegratorConfig cfg;
    cfg.max_steps = 3;
    std::vector<cplx> z{cplx{0.1}};
    IntegrationStats st = integrate(rhs, z, 0.0, 20.0, cfg);
    REQUIRE(st.status == IntegrationStatus::max_steps_exceeded);
    REQUIRE(st.t_final < 20.0);
}

TEST_CASE("a poisoned field shrinks the step until underflow is reported") {
    auto poison = [](double t, std::span<const cplx> z, std::span<cplx> dz) {
        for (size_t i = 0; i < z.size(); ++i)
            dz[i] = t > 0.5 ? cplx{std::nan(""), 0.0} : -z[i];
    };
    std::vector<cplx> z{cplx{1.0}};
    IntegratorConfig cfg;
    IntegrationStats st = integrate(poison, z, 0.0, 1.0, cfg);
    REQUIRE((st.status == IntegrationStatus::step_underflow ||
             st.status == IntegrationStatus::max_steps_exceeded));
    REQUIRE(st.t_final <= 0.5 + 1e-9);
}

TEST_CASE("observer sees the initial state and every accepted step") {
    HigherOrderEnergy e(2, 1);
    OscillatorParams p;
    NetworkRhs rhs(e, p);
    IntegratorConfig cfg;

    std::vector<double> times;
    std::vector<cplx> z{cplx{0.1}, cplx{-0.2}};
    IntegrationStats st = integrate(rhs, z, 0.0, 5.0, cfg,
                                    [&](double t, std::span<const cplx>) { times.push_back(t); });
    REQUIRE(st.status == IntegrationStatus::done);
    REQUIRE(times.size() == st.accepted + 1);
    REQUIRE(times.front() == 0.0);
    REQUIRE(times.back() == 5.0);
    for (size_t i = 1; i < times.size(); ++i) REQUIRE(times[i] > times[i - 1]);

    cfg.method = StepperKind::fixed_rk4;
    cfg.fixed_step = 0.5;
    times.clear();
    std::vector<cplx> z2{cplx{0.1}, cplx{-0.2}};
    integrate(rhs, z2, 0.0, 5.0, cfg,
              [&](double t, std::span<const cplx>) { times.push_back(t); });
    REQUIRE(times.size() == 11);
    REQUIRE(times.back() == 5.0);
}

TEST_CASE("integrator configuration is validated") {
    IntegratorConfig cfg;
    cfg.abs_tol = 0.0;
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.fixed_step = -1.0;
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.max_steps = 0;
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);

    HigherOrderEnergy e(1, 1);
    OscillatorParams p;
    NetworkRhs rhs(e, p);
    std::vector<cplx> z{cplx{0.1}};
    REQUIRE_THROWS_AS(integrate(rhs, z, 1.0, 0.5, IntegratorConfig{}), std::invalid_argument);
}
