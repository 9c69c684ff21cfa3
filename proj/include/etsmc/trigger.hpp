#pragma once

// Dynamic event-triggering rule and inter-event bookkeeping.
//
//   delta = max_i | zeta e_i + xi edot_i^2 | - psi (m1 + m2 exp(-varsigma t))
//
// A control update is due at the first instant where delta >= 0. The
// decaying threshold term keeps the band wide during start-up and narrows
// it towards psi*m1 at steady state.

#include "etsmc/controller.hpp"
#include "etsmc/error.hpp"
#include "etsmc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace etsmc {

struct TriggerParams {
    double zeta = 0.8;   ///< weight on the error
    double xi = 0.8;     ///< weight on the squared error rate
    double psi = 0.5;    ///< threshold scale, in (0, 1)
    double m1 = 1e-4;    ///< persistent floor
    double m2 = 0.2025;  ///< decaying part
    double varsigma = 0.97;
    bool use_x1 = false;  ///< composition error participates
    bool use_x2 = true;   ///< temperature error participates

    friend bool operator==(const TriggerParams&, const TriggerParams&) = default;
};

inline void validate(const TriggerParams& tp) {
    if (!(tp.zeta > 0.0)) throw InvalidParameterError("zeta must be positive");
    if (!(tp.xi > 0.0)) throw InvalidParameterError("xi must be positive");
    if (!(tp.psi > 0.0 && tp.psi < 1.0)) throw InvalidParameterError("psi must lie in (0,1)");
    if (!(tp.m1 >= 0.0)) throw InvalidParameterError("m1 must be non-negative");
    if (!(tp.m2 >= 0.0)) throw InvalidParameterError("m2 must be non-negative");
    if (!(tp.m1 + tp.m2 > 0.0)) throw InvalidParameterError("m1 + m2 must be positive");
    if (!(tp.varsigma > 0.0 && tp.varsigma < 1.0)) throw InvalidParameterError("varsigma must lie in (0,1)");
    if (!tp.use_x1 && !tp.use_x2) throw InvalidParameterError("at least one error component must drive triggering");
}

/// psi (m1 + m2 exp(-varsigma t)); positive and nonincreasing in t.
[[nodiscard]] inline double threshold(double t, const TriggerParams& tp) {
    return tp.psi * (tp.m1 + tp.m2 * std::exp(-tp.varsigma * t));
}

[[nodiscard]] inline double delta(const ErrorState& e, double t, const TriggerParams& tp) {
    double worst = -std::numeric_limits<double>::infinity();
    if (tp.use_x1) worst = std::max(worst, std::abs(tp.zeta * e.e1 + tp.xi * e.e1dot * e.e1dot));
    if (tp.use_x2) worst = std::max(worst, std::abs(tp.zeta * e.e2 + tp.xi * e.e2dot * e.e2dot));
    return worst - threshold(t, tp);
}

[[nodiscard]] inline bool should_trigger(double delta_value) noexcept { return delta_value >= 0.0; }

[[nodiscard]] inline bool should_trigger(const ErrorState& e, double t, const TriggerParams& tp) {
    return should_trigger(delta(e, t, tp));
}

/// Triggering instants t_k with the gaps T_k = t_{k+1} - t_k.
struct EventLog {
    std::vector<double> instants;
    std::vector<double> gaps;
    std::vector<double> delta_at_event;
    std::vector<double> bound_at_event;  ///< filled after the run, once eps_inf is known
    std::vector<DimlessState> state_at_event;

    void record(double t, double delta_value, DimlessState x) {
        if (!instants.empty()) {
            if (!(t > instants.back())) throw InvalidParameterError("event instants must be strictly increasing");
            gaps.push_back(t - instants.back());
        }
        instants.push_back(t);
        delta_at_event.push_back(delta_value);
        state_at_event.push_back(x);
    }

    [[nodiscard]] std::size_t size() const { return instants.size(); }
};

struct LipschitzEstimate {
    double L_bar = 0.0;        ///< safety factor times sampled_max
    double sampled_max = 0.0;  ///< largest Jacobian spectral norm seen
    StateBox box;
    std::size_t sample_count = 0;
};

inline constexpr double kLipschitzSafetyFactor = 1.1;
inline constexpr StateBox kLipschitzBox{0.0, 1.0, 0.0, 5.0};
inline constexpr std::size_t kLipschitzSamples = 10000;

namespace detail {

/// i-th point of the two-dimensional Sobol' sequence in [0,1)^2. Direct
/// (non Gray-code) indexing, so the first n points are the same for every
/// sample size.
inline std::pair<double, double> sobol2(std::uint32_t i) {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t v = 1u << 31;
    for (int bit = 0; bit < 32; ++bit, v ^= v >> 1) {
        if (i & (1u << bit)) {
            a ^= 1u << (31 - bit);
            b ^= v;
        }
    }
    constexpr double scale = 1.0 / 4294967296.0;
    return {a * scale, b * scale};
}

}  // namespace detail

/// L_bar = 1.1 * max ||J(x)||_2 over `n` Sobol' points in `box`.
template <class JacobianFn>
[[nodiscard]] LipschitzEstimate estimate_lipschitz(JacobianFn&& jac, const StateBox& box, std::size_t n) {
    if (n < 100) throw InvalidParameterError("Lipschitz estimate needs at least 100 samples");
    if (!(box.x1_max > box.x1_min) || !(box.x2_max > box.x2_min)) {
        throw InvalidParameterError("Lipschitz box is empty");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [u, v] = detail::sobol2(static_cast<std::uint32_t>(i));
        const DimlessState x{box.x1_min + u * (box.x1_max - box.x1_min), box.x2_min + v * (box.x2_max - box.x2_min)};
        worst = std::max(worst, spectral_norm(jac(x)));
    }
    if (!(worst > 0.0) || !std::isfinite(worst)) throw InvalidParameterError("degenerate Lipschitz estimate");
    return {kLipschitzSafetyFactor * worst, worst, box, n};
}

[[nodiscard]] inline LipschitzEstimate estimate_lipschitz(const DimlessParams& p, const StateBox& box = kLipschitzBox,
                                                          std::size_t n = kLipschitzSamples) {
    return estimate_lipschitz([&p](DimlessState x) { return jacobian(x, p); }, box, n);
}

/// Lower bound on the inter-event time after an update at state x_k:
///
///   T_min = (1/L) ln( L eps / (L (1 + ||Bbar lambda^T|| / (lambda2 beta)) ||x_k|| + ||Bbar|| mu) + 1 )
///
/// with Bbar = (0, beta)^T. Bbar lambda^T is rank one, so its spectral norm
/// is ||Bbar|| ||lambda||.
[[nodiscard]] inline double zeno_bound(DimlessState x_k, double eps_max, const LipschitzEstimate& L,
                                       const DimlessParams& p, const SlidingParams& sp) {
    if (!(L.L_bar > 0.0)) throw InvalidParameterError("L_bar must be positive");
    if (!(eps_max > 0.0)) throw InvalidParameterError("eps_max must be positive");
    const double b_norm = std::abs(p.beta);
    const double lambda_norm = std::hypot(sp.lambda1, sp.lambda2);
    const double gain_norm = b_norm * lambda_norm / std::abs(sp.lambda2 * p.beta);
    const double growth = L.L_bar * (1.0 + gain_norm) * norm(x_k) + b_norm * sp.mu;
    return std::log1p(L.L_bar * eps_max / growth) / L.L_bar;
}

}  // namespace etsmc
