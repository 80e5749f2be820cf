#pragma once

// Hardware-cost accounting for a factored higher-order model vs the
// quadratic baseline. A k-spin term costs k(k-1) connections all-to-all
// (every ordered pair) or 2k through a hub node; couplings of a
// quadratic model count as k = 2 terms and biases need no connections.
// Parameters count sign/weight entries: k per factored term, one per
// nonzero bias or coupling.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "hoim/energy.hpp"
#include "hoim/quadratic.hpp"

namespace hoim {

enum class ConnectionScheme { all_to_all, hub_node };

inline std::string to_string(ConnectionScheme scheme) {
    return scheme == ConnectionScheme::all_to_all ? "all-to-all" : "hub-node";
}

struct ResourceReport {
    std::string scheme;
    int spins = 0;
    long long connections = 0;
    long long parameters = 0;
    int coefficient_bits = 0;
};

namespace detail {

inline long long connections_for_order(int k, ConnectionScheme scheme) {
    return scheme == ConnectionScheme::all_to_all ? static_cast<long long>(k) * (k - 1)
                                                  : 2ll * k;
}

/// Bits of the largest coefficient after scaling by the smallest power
/// of two (up to 2^12) that makes every coefficient integral; falls back
/// to the unscaled magnitude when no such scale exists.
template <class Range>
int coefficient_bits(const Range& coefficients) {
    double max_abs = 0.0;
    for (double c : coefficients) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) return 0;
    for (int shift = 0; shift <= 12; ++shift) {
        const double scale = std::ldexp(1.0, shift);
        bool integral = true;
        for (double c : coefficients) {
            const double s = c * scale;
            if (s != std::nearbyint(s)) {
                integral = false;
                break;
            }
        }
        if (integral) {
            const auto top = static_cast<std::uint64_t>(std::abs(max_abs) * scale);
            return static_cast<int>(std::bit_width(top));
        }
    }
    const auto top = static_cast<std::uint64_t>(std::ceil(max_abs));
    return static_cast<int>(std::bit_width(top));
}

}  // namespace detail

inline ResourceReport count_resources(const HigherOrderEnergy& energy, ConnectionScheme scheme) {
    ResourceReport r;
    r.scheme = to_string(scheme);
    r.spins = energy.num_vars();
    std::vector<double> coeffs;
    coeffs.reserve(energy.terms().size());
    for (const ClauseTerm& t : energy.terms()) {
        r.connections += detail::connections_for_order(t.order(), scheme);
        r.parameters += t.order();
        coeffs.push_back(t.weight);
    }
    r.coefficient_bits = detail::coefficient_bits(coeffs);
    return r;
}

inline ResourceReport count_resources(const QuadraticModel& model, ConnectionScheme scheme) {
    ResourceReport r;
    r.scheme = to_string(scheme);
    r.spins = model.num_spins();
    std::vector<double> coeffs;
    for (double h : model.biases()) {
        if (h == 0.0) continue;
        ++r.parameters;
        coeffs.push_back(h);
    }
    for (const Coupling& c : model.couplings()) {
        if (c.value == 0.0) continue;
        r.connections += detail::connections_for_order(2, scheme);
        ++r.parameters;
        coeffs.push_back(c.value);
    }
    r.coefficient_bits = detail::coefficient_bits(coeffs);
    return r;
}

}  // namespace hoim
