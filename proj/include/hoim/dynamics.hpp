#pragma once

// Coupled-oscillator vector field: per-oscillator Hopf dynamics, minus
// the energy gradient scaled by the coupling strength, plus a linearly
// ramped injection-locking term q(t) * conj(z) that makes the real axis
// attracting and binarizes phases. With omega = 0 everything lives in
// the rotating frame, so one simulated time unit is reported as one
// cycle.

#include <complex>
#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include "hoim/energy.hpp"

namespace hoim {

struct OscillatorParams {
    double lambda = 1.0;    // per-oscillator gain
    double rho = 1.0;       // cubic nonlinearity magnitude; applied saturating
    double omega = 0.0;     // center frequency, radians per unit time
    double coupling = 0.5;  // uniform gradient coupling r, constant in time
    double q_max = 1.0;     // terminal injection-locking strength
    double t_end = 8.0;     // schedule duration in cycles
    bool normalize = true;  // evaluate the gradient at z/|z| instead of z
    int exponent = 1;       // energy exponent used when building the model
};

inline void validate(const OscillatorParams& p) {
    if (!(p.lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!(p.rho != 0)) throw std::invalid_argument("rho must be nonzero");
    if (!(p.coupling >= 0)) throw std::invalid_argument("coupling must be nonnegative");
    if (!(p.q_max >= 0)) throw std::invalid_argument("q_max must be nonnegative");
    if (!(p.t_end > 0)) throw std::invalid_argument("t_end must be positive");
    if (p.exponent != 1 && p.exponent != 2) throw std::invalid_argument("exponent must be 1 or 2");
}

struct OscillatorState {
    std::vector<cplx> z;
    double t = 0.0;
};

/// (lambda + i*omega) z - |rho| z |z|^2. The cubic term always damps, so
/// the radial dynamics has fixed points at |z| = 0 and sqrt(lambda/|rho|)
/// (unit amplitude at the defaults).
inline cplx hopf_rhs(cplx z, const OscillatorParams& p) {
    return cplx{p.lambda, p.omega} * z - std::abs(p.rho) * z * std::norm(z);
}

/// Phase-quantization signal: under q * conj(z) the real part grows at
/// rate lambda + q and the imaginary part at lambda - q.
inline cplx shil_term(cplx z) { return std::conj(z); }

/// Linear ramp q_max * t / t_end, held at q_max past t_end.
inline double schedule_q(double t, const OscillatorParams& p) {
    if (t >= p.t_end) return p.q_max;
    return p.q_max * (t / p.t_end);
}

template <class M>
concept GradientProvider = requires(const M& m, std::span<const cplx> z, std::span<cplx> g) {
    { dimension(m) } -> std::convertible_to<int>;
    gradient_into(m, z, g);
};

namespace detail {

// namespace-scope trampoline: inside NetworkRhs the member dimension()
// would shadow the model overloads found through ADL
template <class M>
int model_dimension(const M& m) {
    return dimension(m);
}

}  // namespace detail

/// Vector field of the whole network. One instance per trial: the
/// scratch buffers make operator() non-reentrant, while the referenced
/// model is only read.
template <GradientProvider Model>
class NetworkRhs {
public:
    NetworkRhs(const Model& model, const OscillatorParams& params)
        : model_(&model), params_(params) {
        validate(params);
        const size_t n = static_cast<size_t>(detail::model_dimension(model));
        arg_.resize(n);
        grad_.resize(n);
    }

    int dimension() const { return static_cast<int>(arg_.size()); }
    const OscillatorParams& params() const { return params_; }

    void operator()(double t, std::span<const cplx> z, std::span<cplx> dz) const {
        const size_t n = arg_.size();
        if (z.size() != n || dz.size() != n)
            throw std::invalid_argument("state dimension mismatch");
        if (params_.normalize) {
            for (size_t i = 0; i < n; ++i) {
                const double a = std::abs(z[i]);
                arg_[i] = a < 1e-12 ? cplx{0.0} : z[i] / a;  // zero-amplitude phase undefined
            }
            gradient_into(*model_, std::span<const cplx>(arg_), std::span<cplx>(grad_));
        } else {
            gradient_into(*model_, z, std::span<cplx>(grad_));
        }
        const double q = schedule_q(t, params_);
        for (size_t i = 0; i < n; ++i)
            dz[i] = hopf_rhs(z[i], params_) - params_.coupling * grad_[i] + q * shil_term(z[i]);
    }

private:
    const Model* model_;
    OscillatorParams params_;
    mutable std::vector<cplx> arg_, grad_;
};

/// Allocating convenience wrapper over NetworkRhs.
template <GradientProvider Model>
std::vector<cplx> system_rhs(const OscillatorState& state, const Model& model,
                             const OscillatorParams& params) {
    NetworkRhs<Model> rhs(model, params);
    std::vector<cplx> dz(state.z.size());
    rhs(state.t, std::span<const cplx>(state.z), std::span<cplx>(dz));
    return dz;
}

}  // namespace hoim
