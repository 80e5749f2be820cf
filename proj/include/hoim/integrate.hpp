#pragma once

// Time integration of complex-valued ODE systems. Two steppers: the
// Dormand-Prince 4(5) embedded pair with FSAL and Lund-stabilized PI
// step control (the standard Hairer constants), and a fixed-step
// classic RK4 for bit-reproducible runs. The error norm treats each
// complex component as one entry via its magnitude.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hoim/energy.hpp"  // cplx

namespace hoim {

enum class StepperKind { adaptive_rk45, fixed_rk4 };

struct IntegratorConfig {
    StepperKind method = StepperKind::adaptive_rk45;
    double abs_tol = 1e-6;
    double rel_tol = 1e-6;
    double initial_step = 0.0;  // 0: 1/100 of the span
    double max_step = 0.0;      // 0: uncapped
    double fixed_step = 1e-2;   // fixed_rk4 only
    long long max_steps = 1'000'000;  // accepted + rejected attempts
};

inline void validate(const IntegratorConfig& c) {
    if (!(c.abs_tol > 0) || !(c.rel_tol > 0)) throw std::invalid_argument("tolerances must be positive");
    if (!(c.fixed_step > 0)) throw std::invalid_argument("fixed_step must be positive");
    if (c.initial_step < 0 || c.max_step < 0) throw std::invalid_argument("negative step bound");
    if (c.max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
}

enum class IntegrationStatus { done, diverged, max_steps_exceeded, step_underflow };

inline const char* to_string(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::done: return "done";
        case IntegrationStatus::diverged: return "diverged";
        case IntegrationStatus::max_steps_exceeded: return "max_steps_exceeded";
        case IntegrationStatus::step_underflow: return "step_underflow";
    }
    return "unknown";
}

struct IntegrationStats {
    IntegrationStatus status = IntegrationStatus::done;
    long long accepted = 0;
    long long rejected = 0;
    double t_final = 0.0;
};

inline constexpr double divergence_limit = 1e6;

namespace detail {

inline bool any_diverged(std::span<const cplx> y) {
    for (const cplx& v : y) {
        const double a = std::abs(v);
        if (!(a <= divergence_limit)) return true;  // catches NaN too
    }
    return false;
}

template <class Rhs, class Observer>
IntegrationStats run_dopri5(Rhs& rhs, std::vector<cplx>& y, double t0, double t1,
                            const IntegratorConfig& cfg, Observer& observe) {
    // Dormand-Prince 4(5) tableau; row 7 doubles as the 5th-order weights
    constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
    constexpr double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0,
                     a42 = -56.0 / 15.0, a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0,
                     a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0,
                     a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0,
                     a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                     a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    constexpr double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;

    const size_t n = y.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    auto span = [](std::vector<cplx>& v) { return std::span<cplx>(v); };
    auto cspan = [](const std::vector<cplx>& v) { return std::span<const cplx>(v); };

    IntegrationStats stats;
    double t = t0;
    double facold = 1e-4;
    double h = cfg.initial_step > 0 ? cfg.initial_step : (t1 - t0) / 100.0;
    if (cfg.max_step > 0) h = std::min(h, cfg.max_step);
    h = std::min(h, t1 - t0);

    observe(t, cspan(y));
    rhs(t, cspan(y), span(k1));

    while (t < t1) {
        if (stats.accepted + stats.rejected >= cfg.max_steps) {
            stats.status = IntegrationStatus::max_steps_exceeded;
            break;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            stats.status = IntegrationStatus::step_underflow;
            break;
        }
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, cspan(ytmp), span(k2));
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, cspan(ytmp), span(k3));
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, cspan(ytmp), span(k4));
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, cspan(ytmp), span(k5));
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, cspan(ytmp), span(k6));
        for (size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, cspan(ynew), span(k7));

        double err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const cplx ee = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                 e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol +
                              cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = std::abs(ee) / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (!std::isfinite(err)) {
            ++stats.rejected;
            h *= 0.1;
            continue;
        }
        const double fac11 = std::pow(err, expo1);
        if (err > 1.0) {
            ++stats.rejected;
            h /= std::min(1.0 / facl, fac11 / safe);
            continue;
        }

        // accepted
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
        facold = std::max(err, 1e-4);
        t = last ? t1 : t + h;
        y.swap(ynew);
        k1.swap(k7);  // FSAL
        ++stats.accepted;
        if (detail::any_diverged(cspan(y))) {
            stats.status = IntegrationStatus::diverged;
            break;
        }
        observe(t, cspan(y));
        h /= fac;
        if (cfg.max_step > 0) h = std::min(h, cfg.max_step);
    }
    stats.t_final = t;
    return stats;
}

template <class Rhs, class Observer>
IntegrationStats run_rk4(Rhs& rhs, std::vector<cplx>& y, double t0, double t1,
                         const IntegratorConfig& cfg, Observer& observe) {
    const size_t n = y.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), ytmp(n);
    auto span = [](std::vector<cplx>& v) { return std::span<cplx>(v); };
    auto cspan = [](const std::vector<cplx>& v) { return std::span<const cplx>(v); };

    IntegrationStats stats;
    const double span_len = t1 - t0;
    const long long nsteps = std::max(1ll, static_cast<long long>(std::ceil(span_len / cfg.fixed_step)));
    const double h = span_len / static_cast<double>(nsteps);

    double t = t0;
    observe(t, cspan(y));
    for (long long step = 0; step < nsteps; ++step) {
        if (stats.accepted >= cfg.max_steps) {
            stats.status = IntegrationStatus::max_steps_exceeded;
            break;
        }
        rhs(t, cspan(y), span(k1));
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, cspan(ytmp), span(k2));
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, cspan(ytmp), span(k3));
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k3[i];
        rhs(t + h, cspan(ytmp), span(k4));
        for (size_t i = 0; i < n; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = step + 1 == nsteps ? t1 : t0 + h * static_cast<double>(step + 1);
        ++stats.accepted;
        if (detail::any_diverged(cspan(y))) {
            stats.status = IntegrationStatus::diverged;
            break;
        }
        observe(t, cspan(y));
    }
    stats.t_final = t;
    return stats;
}

}  // namespace detail

/// Advances y in place from t0 to t1; the observer sees (t, y) at t0 and
/// after every accepted step. On divergence (any |y_i| > 1e6) or budget
/// exhaustion the state and stats.t_final hold the last reached point.
template <class Rhs, class Observer>
IntegrationStats integrate(Rhs&& rhs, std::vector<cplx>& y, double t0, double t1,
                           const IntegratorConfig& cfg, Observer&& observe) {
    validate(cfg);
    if (!(t1 > t0)) throw std::invalid_argument("time span must be forward");
    if (cfg.method == StepperKind::adaptive_rk45)
        return detail::run_dopri5(rhs, y, t0, t1, cfg, observe);
    return detail::run_rk4(rhs, y, t0, t1, cfg, observe);
}

template <class Rhs>
IntegrationStats integrate(Rhs&& rhs, std::vector<cplx>& y, double t0, double t1,
                           const IntegratorConfig& cfg) {
    auto noop = [](double, std::span<const cplx>) {};
    return integrate(std::forward<Rhs>(rhs), y, t0, t1, cfg, noop);
}

}  // namespace hoim
