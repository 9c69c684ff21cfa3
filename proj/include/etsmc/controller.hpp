#pragma once

// Sliding-mode temperature controller.
//
// Surface:            sigma = lambda1 e1 + lambda2 e2
// Continuous law:     u = -(lambda2 beta)^-1 (lambda^T F(x, t) + mu sign(sigma))
// Event-held law:     the same expression frozen at the last triggering
//                     instant t_k and applied unchanged on [t_k, t_{k+1}).
//
// F is the drift of the error dynamics (plant drift, measured disturbance,
// reference rate), so that sigma' = lambda^T F + lambda2 beta u.

#include "etsmc/error.hpp"
#include "etsmc/plant.hpp"

#include <cmath>

namespace etsmc {

struct SlidingParams {
    double lambda1 = 1.0;
    double lambda2 = 2.0;
    double mu = 25.0;  ///< switching gain
    /// Width of an optional tanh boundary layer; 0 selects the pure sign law.
    double boundary_layer = 0.0;
    /// Diagnostic only: drive sigma away from the manifold. Used to check
    /// that the reachability verifier actually detects a broken loop.
    bool reverse_switching = false;

    friend bool operator==(const SlidingParams&, const SlidingParams&) = default;
};

inline void validate(const SlidingParams& sp) {
    if (!std::isfinite(sp.lambda1)) throw InvalidParameterError("lambda1 must be finite");
    if (sp.lambda2 == 0.0 || !std::isfinite(sp.lambda2)) throw InvalidParameterError("lambda2 must be nonzero");
    if (!(sp.mu > 0.0)) throw InvalidParameterError("mu must be positive");
    if (!(sp.boundary_layer >= 0.0)) throw InvalidParameterError("boundary_layer must be non-negative");
}

/// Startup reference: constant composition, temperature rising as
/// x2ss (1 - k1 exp(-k2 t)). Rates are analytic.
struct ReferenceSignal {
    double x1ref = 0.4472;
    double x2ss = 2.6516;
    double k1 = 1.0;
    double k2 = 1.0;

    [[nodiscard]] double x1(double) const { return x1ref; }
    [[nodiscard]] double x1_rate(double) const { return 0.0; }
    [[nodiscard]] double x2(double t) const { return x2ss * (1.0 - k1 * std::exp(-k2 * t)); }
    [[nodiscard]] double x2_rate(double t) const { return x2ss * k1 * k2 * std::exp(-k2 * t); }

    [[nodiscard]] DimlessState value(double t) const { return {x1(t), x2(t)}; }
    [[nodiscard]] DimlessState rate(double t) const { return {x1_rate(t), x2_rate(t)}; }

    friend bool operator==(const ReferenceSignal&, const ReferenceSignal&) = default;
};

struct ErrorState {
    double e1 = 0.0;
    double e2 = 0.0;
    double e1dot = 0.0;
    double e2dot = 0.0;
};

/// Tracking errors and their rates under the input `u` actually applied.
[[nodiscard]] inline ErrorState error_state(DimlessState x, double t, double u, const DimlessParams& p,
                                            const Disturbance& d, const ReferenceSignal& r) {
    const DimlessState xdot = state_derivative(x, u, t, p, d);
    const DimlessState ref = r.value(t);
    const DimlessState ref_rate = r.rate(t);
    return {x.x1 - ref.x1, x.x2 - ref.x2, xdot.x1 - ref_rate.x1, xdot.x2 - ref_rate.x2};
}

[[nodiscard]] inline double sigma(const ErrorState& e, const SlidingParams& sp) {
    return sp.lambda1 * e.e1 + sp.lambda2 * e.e2;
}

[[nodiscard]] inline double sigma(DimlessState x, double t, const ReferenceSignal& r, const SlidingParams& sp) {
    return sp.lambda1 * (x.x1 - r.x1(t)) + sp.lambda2 * (x.x2 - r.x2(t));
}

/// sign with sign(0) = 0.
[[nodiscard]] constexpr double sign(double s) noexcept {
    return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
}

/// The discontinuous term, optionally smoothed.
[[nodiscard]] inline double switching(double s, const SlidingParams& sp) {
    const double dir = sp.reverse_switching ? -1.0 : 1.0;
    if (sp.boundary_layer > 0.0) return dir * std::tanh(s / sp.boundary_layer);
    return dir * sign(s);
}

/// Error-dynamics drift F(x, t). The second row subtracts the temperature
/// reference rate, which is what sigma' actually contains.
[[nodiscard]] inline DimlessState drift_vector(DimlessState x, double t, const DimlessParams& p, const Disturbance& d,
                                               const ReferenceSignal& r) {
    const auto dv = d.at(t);
    return {eval_f1(x, p) - dv.d2 - r.x1_rate(t), eval_f2(x, p) + dv.d1 - r.x2_rate(t)};
}

[[nodiscard]] inline double continuous_control(DimlessState x, double t, const DimlessParams& p, const Disturbance& d,
                                               const ReferenceSignal& r, const SlidingParams& sp) {
    const DimlessState F = drift_vector(x, t, p, d, r);
    const double s = sigma(x, t, r, sp);
    return -(sp.lambda1 * F.x1 + sp.lambda2 * F.x2 + sp.mu * switching(s, sp)) / (sp.lambda2 * p.beta);
}

/// sigma' along the plant with input `u`: lambda^T F(x, t) + lambda2 beta u.
[[nodiscard]] inline double sigma_rate(DimlessState x, double t, double u, const DimlessParams& p,
                                       const Disturbance& d, const ReferenceSignal& r, const SlidingParams& sp) {
    const DimlessState F = drift_vector(x, t, p, d, r);
    return sp.lambda1 * F.x1 + sp.lambda2 * F.x2 + sp.lambda2 * p.beta * u;
}

/// Zero-order-hold control record. The simulation loop owns exactly one.
struct HeldControl {
    double u = 0.0;
    double t_k = 0.0;
    DimlessState x_k;
    double sigma_k = 0.0;

    /// Value applied at `t`, which must lie at or after the update instant.
    [[nodiscard]] double value_at(double t) const {
        if (t < t_k) throw InvalidParameterError("held control queried before its update instant");
        return u;
    }
};

/// Recompute the control from the snapshot at a triggering instant.
[[nodiscard]] inline HeldControl event_control_update(DimlessState x_k, double t_k, const DimlessParams& p,
                                                      const Disturbance& d, const ReferenceSignal& r,
                                                      const SlidingParams& sp) {
    return {continuous_control(x_k, t_k, p, d, r, sp), t_k, x_k, sigma(x_k, t_k, r, sp)};
}

}  // namespace etsmc
