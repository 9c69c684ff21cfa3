#pragma once

// Dimensionless CSTR model: exothermic first-order reaction A -> B in an
// ideally mixed vessel, cooled through a jacket whose temperature is the
// manipulated input.
//
//   x1' = -x1 + Da (1 - x1) exp(x2 / (1 + x2/gamma))                         - d2(t)
//   x2' = -x2 + B Da (1 - x1) exp(x2 / (1 + x2/gamma)) - beta (x2 - x2c0) + beta u + d1(t)
//
// The physical-unit helpers at the bottom only convert parameters and
// report temperatures; integration always happens on the form above.

#include "etsmc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace etsmc {

// ---------------------------------------------------------------------------
// State and parameter records
// ---------------------------------------------------------------------------

/// (composition, temperature) in dimensionless units. Also used for rates.
struct DimlessState {
    double x1 = 0.0;
    double x2 = 0.0;

    friend constexpr DimlessState operator+(DimlessState a, DimlessState b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend constexpr DimlessState operator-(DimlessState a, DimlessState b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend constexpr DimlessState operator*(double s, DimlessState a) { return {s * a.x1, s * a.x2}; }
    friend constexpr bool operator==(DimlessState, DimlessState) = default;
};

[[nodiscard]] inline double norm(DimlessState a) { return std::hypot(a.x1, a.x2); }

[[nodiscard]] inline bool is_finite(DimlessState a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

/// Plant constants of the dimensionless model.
struct DimlessParams {
    double Da = 0.078;    ///< Damkohler number
    double gamma = 20.0;  ///< activation energy over R*Tf0
    double B = 8.0;       ///< adiabatic temperature rise
    double beta = 0.3;    ///< heat-transfer coefficient
    double x2c0 = 0.0;    ///< nominal coolant temperature

    friend bool operator==(const DimlessParams&, const DimlessParams&) = default;
};

inline void validate(const DimlessParams& p) {
    if (!(p.Da > 0.0)) throw InvalidParameterError("Da must be positive");
    if (!(p.gamma > 0.0)) throw InvalidParameterError("gamma must be positive");
    if (!(p.B > 0.0)) throw InvalidParameterError("B must be positive");
    if (!(p.beta > 0.0)) throw InvalidParameterError("beta must be positive");
    if (!std::isfinite(p.x2c0)) throw InvalidParameterError("x2c0 must be finite");
}

/// a * sin(omega * t)
struct Sinusoid {
    double amplitude = 0.0;
    double frequency = 0.0;

    [[nodiscard]] double operator()(double t) const { return amplitude * std::sin(frequency * t); }
    friend bool operator==(const Sinusoid&, const Sinusoid&) = default;
};

/// Measurable feed disturbances: d1 acts on temperature, d2 on composition.
struct Disturbance {
    Sinusoid d1;
    Sinusoid d2;

    struct Value {
        double d1 = 0.0;
        double d2 = 0.0;
    };

    /// Sup-norm bound of the signal pair.
    [[nodiscard]] double bound() const { return std::max(std::abs(d1.amplitude), std::abs(d2.amplitude)); }

    [[nodiscard]] Value at(double t) const {
        const Value v{d1(t), d2(t)};
        const double b = bound();
        if (std::abs(v.d1) > b || std::abs(v.d2) > b) {
            throw InvalidParameterError("disturbance exceeds its declared bound at t=" + std::to_string(t));
        }
        return v;
    }

    [[nodiscard]] static Disturbance none() { return {}; }

    friend bool operator==(const Disturbance&, const Disturbance&) = default;
};

/// Physical CSTR parameters. Units follow the usual textbook convention
/// (minutes, kmol, m^3, cal, K); only ratios enter the dimensionless model.
struct PhysicalParams {
    double k0 = 0.0;     ///< pre-exponential rate constant [1/min]
    double CAf0 = 0.0;   ///< nominal feed concentration [kmol/m^3]
    double F0 = 0.0;     ///< nominal feed flow [m^3/min]
    double rho = 0.0;    ///< density [g/m^3]
    double Cp = 0.0;     ///< specific heat [cal/(degC g)]
    double dH = 0.0;     ///< heat of reaction [cal/kmol], negative (exothermic)
    double rhoc = 0.0;   ///< coolant density
    double Cpc = 0.0;    ///< coolant specific heat
    double V = 0.0;      ///< reactor volume [m^3]
    double Fc = 0.0;     ///< coolant flow [m^3/min]
    double E = 0.0;      ///< activation energy [J/mol]
    double R = 0.0;      ///< gas constant [J/(mol K)]
    double Tf0 = 0.0;    ///< nominal feed temperature [K]
    double Tc0 = 0.0;    ///< nominal coolant temperature [K]
    double a = 0.0;      ///< heat-transfer correlation coefficient
    double b = 0.0;      ///< heat-transfer correlation exponent (any sign)

    friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

inline void validate(const PhysicalParams& pp) {
    const std::array<std::pair<const char*, double>, 14> positive{{
        {"k0", pp.k0}, {"CAf0", pp.CAf0}, {"F0", pp.F0}, {"rho", pp.rho}, {"Cp", pp.Cp},
        {"rhoc", pp.rhoc}, {"Cpc", pp.Cpc}, {"V", pp.V}, {"Fc", pp.Fc}, {"E", pp.E},
        {"R", pp.R}, {"Tf0", pp.Tf0}, {"Tc0", pp.Tc0}, {"a", pp.a},
    }};
    for (const auto& [name, value] : positive) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw InvalidParameterError(std::string(name) + " must be positive");
        }
    }
    if (!(pp.dH < 0.0)) throw InvalidParameterError("dH must be negative (exothermic reaction)");
    if (!std::isfinite(pp.b)) throw InvalidParameterError("b must be finite");
}

/// Strong type for absolute temperatures.
struct Kelvin {
    double value = 0.0;
    friend constexpr bool operator==(Kelvin, Kelvin) = default;
};

// ---------------------------------------------------------------------------
// Dimensionless dynamics
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kSingularTolerance = 1e-12;

/// 1 + x2/gamma, rejecting the pole of the exponent.
inline double exponent_denominator(double x2, double gamma) {
    const double den = 1.0 + x2 / gamma;
    if (std::abs(den) < kSingularTolerance) {
        throw SingularExponentError("1 + x2/gamma vanishes at x2=" + std::to_string(x2));
    }
    return den;
}

/// Da * exp(x2 / (1 + x2/gamma)), shared by both balances.
inline double arrhenius(double x2, const DimlessParams& p) {
    return p.Da * std::exp(x2 / exponent_denominator(x2, p.gamma));
}

}  // namespace detail

/// Undisturbed composition drift.
[[nodiscard]] inline double eval_f1(DimlessState x, const DimlessParams& p) {
    return -x.x1 + (1.0 - x.x1) * detail::arrhenius(x.x2, p);
}

/// Undisturbed temperature drift (without the control term).
[[nodiscard]] inline double eval_f2(DimlessState x, const DimlessParams& p) {
    return -x.x2 + p.B * (1.0 - x.x1) * detail::arrhenius(x.x2, p) - p.beta * (x.x2 - p.x2c0);
}

/// Full right-hand side with coolant input `u` and disturbances evaluated at `t`.
[[nodiscard]] inline DimlessState state_derivative(DimlessState x, double u, double t, const DimlessParams& p,
                                                   const Disturbance& d) {
    const auto dv = d.at(t);
    return {eval_f1(x, p) - dv.d2, eval_f2(x, p) + p.beta * u + dv.d1};
}

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

/// Largest singular value, closed form for the 2x2 case.
[[nodiscard]] inline double spectral_norm(const Mat2& m) {
    // eigenvalues of M^T M
    const double p = m.a11 * m.a11 + m.a21 * m.a21;
    const double q = m.a12 * m.a12 + m.a22 * m.a22;
    const double r = m.a11 * m.a12 + m.a21 * m.a22;
    const double half_trace = 0.5 * (p + q);
    const double disc = std::sqrt(0.25 * (p - q) * (p - q) + r * r);
    return std::sqrt(half_trace + disc);
}

/// Analytic Jacobian of (f1, f2) with respect to (x1, x2).
[[nodiscard]] inline Mat2 jacobian(DimlessState x, const DimlessParams& p) {
    const double den = detail::exponent_denominator(x.x2, p.gamma);
    const double k = p.Da * std::exp(x.x2 / den);
    const double dexp = 1.0 / (den * den);  // d/dx2 [x2 / (1 + x2/gamma)]
    const double remaining = 1.0 - x.x1;
    return {
        -1.0 - k,
        remaining * k * dexp,
        -p.B * k,
        -1.0 + p.B * remaining * k * dexp - p.beta,
    };
}

/// Steady composition for a fixed temperature: the unique root of f1(., x2) = 0.
[[nodiscard]] inline double composition_at_temperature(double x2, const DimlessParams& p) {
    const double k = detail::arrhenius(x2, p);
    return k / (1.0 + k);
}

/// Axis-aligned region of the state plane.
struct StateBox {
    double x1_min = 0.0, x1_max = 1.0;
    double x2_min = 0.0, x2_max = 6.0;

    [[nodiscard]] bool contains(DimlessState x, double slack = 1e-9) const {
        return x.x1 >= x1_min - slack && x.x1 <= x1_max + slack && x.x2 >= x2_min - slack && x.x2 <= x2_max + slack;
    }
    friend bool operator==(const StateBox&, const StateBox&) = default;
};

/// Default equilibrium search region, bracketing the usual operating points.
inline constexpr StateBox kEquilibriumBox{0.0, 1.0, 0.0, 6.0};

/// Undisturbed steady states with the coolant input frozen at `u`.
///
/// Newton's method is seeded from a 20x20 grid over the domain; roots with
/// residual below 1e-10 inside the domain are kept, deduplicated and
/// sorted by temperature. An empty result is a diagnostic, not an error.
[[nodiscard]] inline std::vector<DimlessState> find_equilibria(const DimlessParams& p, double u,
                                                               StateBox dom = kEquilibriumBox) {
    constexpr int kSeeds = 20;
    constexpr int kMaxIter = 60;
    constexpr double kResidualTol = 1e-10;
    constexpr double kDuplicateTol = 1e-7;

    const auto residual = [&](DimlessState x) { return DimlessState{eval_f1(x, p), eval_f2(x, p) + p.beta * u}; };

    std::vector<DimlessState> roots;
    for (int i = 0; i < kSeeds; ++i) {
        for (int j = 0; j < kSeeds; ++j) {
            DimlessState x{dom.x1_min + (dom.x1_max - dom.x1_min) * i / (kSeeds - 1),
                           dom.x2_min + (dom.x2_max - dom.x2_min) * j / (kSeeds - 1)};
            bool converged = false;
            try {
                for (int it = 0; it < kMaxIter; ++it) {
                    const DimlessState F = residual(x);
                    if (!is_finite(F)) break;
                    if (norm(F) < 0.1 * kResidualTol) {
                        converged = true;
                        break;
                    }
                    const Mat2 J = jacobian(x, p);
                    const double det = J.a11 * J.a22 - J.a12 * J.a21;
                    if (std::abs(det) < 1e-300) break;
                    x = x - DimlessState{(J.a22 * F.x1 - J.a12 * F.x2) / det, (-J.a21 * F.x1 + J.a11 * F.x2) / det};
                    if (!is_finite(x)) break;
                }
                if (!converged && is_finite(x)) converged = norm(residual(x)) < kResidualTol;
            } catch (const SingularExponentError&) {
                converged = false;
            }
            if (!converged || !dom.contains(x)) continue;
            const bool seen = std::any_of(roots.begin(), roots.end(),
                                          [&](DimlessState r) { return norm(r - x) < kDuplicateTol; });
            if (!seen) roots.push_back(x);
        }
    }
    std::sort(roots.begin(), roots.end(), [](DimlessState a, DimlessState b) { return a.x2 < b.x2; });
    return roots;
}

// ---------------------------------------------------------------------------
// Physical layer
// ---------------------------------------------------------------------------

/// Jacket heat-transfer term hA as a function of coolant flow.
[[nodiscard]] inline double heat_transfer_area(const PhysicalParams& pp) {
    const double fcb = std::pow(pp.Fc, pp.b);
    const double den = pp.Fc + pp.a * fcb / (2.0 * pp.rhoc * pp.Cpc);
    if (!(std::abs(den) > 0.0) || !std::isfinite(den)) {
        throw InvalidParameterError("heat-transfer denominator vanishes");
    }
    return pp.a * fcb * pp.Fc / den;
}

[[nodiscard]] inline DimlessParams physical_to_dimensionless(const PhysicalParams& pp) {
    validate(pp);
    DimlessParams p;
    p.gamma = pp.E / (pp.R * pp.Tf0);
    if (!std::isfinite(p.gamma)) throw InvalidParameterError("gamma = E/(R*Tf0) is not finite");
    p.B = (-pp.dH) * pp.CAf0 * p.gamma / (pp.rho * pp.Cp * pp.Tf0);
    p.Da = pp.k0 * std::exp(-p.gamma) * pp.V / pp.F0;
    p.beta = heat_transfer_area(pp) / (pp.rho * pp.Cp * pp.F0);
    p.x2c0 = p.gamma * (pp.Tc0 - pp.Tf0) / pp.Tf0;
    return p;
}

[[nodiscard]] inline double kelvin_to_x2(Kelvin T, Kelvin Tf0, double gamma) {
    if (!(Tf0.value > 0.0)) throw InvalidParameterError("Tf0 must be positive");
    return gamma * (T.value - Tf0.value) / Tf0.value;
}

[[nodiscard]] inline Kelvin x2_to_kelvin(double x2, Kelvin Tf0, double gamma) {
    if (!(Tf0.value > 0.0)) throw InvalidParameterError("Tf0 must be positive");
    return Kelvin{Tf0.value + x2 * Tf0.value / gamma};
}

/// Arrhenius rate k0 exp(-E/(R T)) CA in kmol/(m^3 min).
[[nodiscard]] inline double reaction_rate(double CA, Kelvin T, const PhysicalParams& pp) {
    if (!(T.value > 0.0)) throw InvalidParameterError("temperature must be positive");
    return pp.k0 * std::exp(-pp.E / (pp.R * T.value)) * CA;
}

}  // namespace etsmc
