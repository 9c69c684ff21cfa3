#pragma once

// Fixed-step closed-loop simulation: plant + sliding-mode controller +
// triggering rule, plus the time-triggered baseline and the post-run
// verification (reachability, Lyapunov decrease, Zeno bound, log checks).

#include "etsmc/controller.hpp"
#include "etsmc/error.hpp"
#include "etsmc/plant.hpp"
#include "etsmc/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace etsmc {

enum class Scenario { nominal, disturbed, regulate };

[[nodiscard]] inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::nominal: return "nominal";
        case Scenario::disturbed: return "disturbed";
        case Scenario::regulate: return "regulate";
    }
    return "unknown";
}

/// Everything needed to reproduce one run.
struct SimConfig {
    double h = 1e-3;     ///< integration step (dimensionless time)
    double t_end = 50.0;
    DimlessState x0{0.0, 0.0};
    Scenario scenario = Scenario::nominal;
    std::optional<double> setpoint_kelvin;  ///< regulate only
    double tf0_kelvin = 300.0;              ///< anchor for setpoint conversion

    DimlessParams plant;
    SlidingParams sliding;
    TriggerParams trigger;
    ReferenceSignal reference;
    Disturbance disturbance{{0.026, 0.1}, {0.037, 0.1}};

    StateBox lipschitz_box = kLipschitzBox;
    std::size_t lipschitz_samples = kLipschitzSamples;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void validate(const SimConfig& cfg) {
    if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw InvalidParameterError("h must be positive");
    if (!(cfg.t_end >= 10.0 * cfg.h) || !std::isfinite(cfg.t_end)) {
        throw InvalidParameterError("t_end must be at least 10 steps");
    }
    if (!is_finite(cfg.x0)) throw InvalidParameterError("initial state must be finite");
    if (cfg.scenario == Scenario::regulate && !cfg.setpoint_kelvin) {
        throw InvalidParameterError("regulate scenario needs a setpoint temperature");
    }
    if (!(cfg.tf0_kelvin > 0.0)) throw InvalidParameterError("tf0_kelvin must be positive");
    validate(cfg.plant);
    validate(cfg.sliding);
    validate(cfg.trigger);
    if (!std::isfinite(cfg.reference.x1ref) || !std::isfinite(cfg.reference.x2ss) ||
        !std::isfinite(cfg.reference.k1) || !std::isfinite(cfg.reference.k2)) {
        throw InvalidParameterError("reference parameters must be finite");
    }
    if (cfg.lipschitz_samples < 100) throw InvalidParameterError("lipschitz_samples must be at least 100");
}

/// Disturbances only act in the disturbed scenario.
[[nodiscard]] inline Disturbance active_disturbance(const SimConfig& cfg) {
    return cfg.scenario == Scenario::disturbed ? cfg.disturbance : Disturbance::none();
}

/// For regulation the temperature asymptote comes from the kelvin setpoint
/// and the composition reference is the matching steady composition.
[[nodiscard]] inline ReferenceSignal active_reference(const SimConfig& cfg) {
    ReferenceSignal r = cfg.reference;
    if (cfg.scenario == Scenario::regulate) {
        r.x2ss = kelvin_to_x2(Kelvin{*cfg.setpoint_kelvin}, Kelvin{cfg.tf0_kelvin}, cfg.plant.gamma);
        r.x1ref = composition_at_temperature(r.x2ss, cfg.plant);
    }
    return r;
}

[[nodiscard]] inline std::size_t step_count(const SimConfig& cfg) {
    return static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.h - 1e-9));
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

/// One classical Runge-Kutta step for x' = rhs(t, x). `State` needs
/// `State + State` and `double * State`.
template <class State, class Rhs>
[[nodiscard]] State rk4_step(const State& x, double t, double h, Rhs&& rhs) {
    const State k1 = rhs(t, x);
    const State k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
    const State k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
    const State k4 = rhs(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Plant step with `u` frozen across all four stages.
[[nodiscard]] inline DimlessState rk4_step(DimlessState x, double u, double t, double h, const DimlessParams& p,
                                           const Disturbance& d) {
    if (!(h > 0.0)) throw InvalidParameterError("step must be positive");
    return rk4_step(x, t, h, [&](double tau, DimlessState y) { return state_derivative(y, u, tau, p, d); });
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

/// Per-grid-point series. `u[k]` is the value applied on [t_k, t_k + h).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> x1, x2;
    std::vector<double> x1ref, x2ref;
    std::vector<double> u;
    std::vector<double> sigma;
    std::vector<double> sigma_dot;  ///< analytic, under the applied u
    std::vector<double> delta;
    std::vector<std::uint8_t> event;
    std::vector<double> V;     ///< sigma^2 / 2
    std::vector<double> band;  ///< threshold(t) / min |lambda|

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] DimlessState state(std::size_t k) const { return {x1[k], x2[k]}; }

    void reserve(std::size_t n) {
        for (auto* v : {&t, &x1, &x2, &x1ref, &x2ref, &u, &sigma, &sigma_dot, &delta, &V, &band}) v->reserve(n);
        event.reserve(n);
    }
};

struct ReachabilityReport {
    bool applicable = false;  ///< false when no sample lies outside the band
    double eta_hat = 0.0;     ///< min of -sigma sigma_dot / |sigma| over out-of-band samples
    std::size_t samples = 0;
    std::vector<std::size_t> violations;  ///< sample indices with sigma sigma_dot >= 0
};

/// Empirical reaching-law check on stored samples.
template <class BandFn>
[[nodiscard]] ReachabilityReport verify_reachability(const Trajectory& traj, BandFn&& band) {
    ReachabilityReport rep;
    double eta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double s = traj.sigma[k];
        if (!(std::abs(s) > band(k))) continue;
        ++rep.samples;
        const double product = s * traj.sigma_dot[k];
        if (!(product < 0.0)) rep.violations.push_back(k);
        eta = std::min(eta, -product / std::abs(s));
    }
    rep.applicable = rep.samples > 0;
    rep.eta_hat = rep.applicable ? eta : 0.0;
    return rep;
}

[[nodiscard]] inline ReachabilityReport verify_reachability(const Trajectory& traj, double band) {
    return verify_reachability(traj, [band](std::size_t) { return band; });
}

/// Uses the time-varying band recorded with the trajectory.
[[nodiscard]] inline ReachabilityReport verify_reachability(const Trajectory& traj) {
    return verify_reachability(traj, [&traj](std::size_t k) { return traj.band[k]; });
}

struct LyapunovReport {
    std::size_t checked = 0;    ///< consecutive pairs judged
    std::size_t crossings = 0;  ///< pairs skipped because sigma changed sign within the step
    std::vector<std::size_t> violations;
};

/// V must not grow from sample k to k+1 while |sigma_k| is outside the band.
/// A step across sigma = 0 means the manifold was reached inside the step,
/// so such pairs are counted separately instead of judged.
[[nodiscard]] inline LyapunovReport verify_lyapunov_decrease(const Trajectory& traj) {
    LyapunovReport rep;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        if (!(std::abs(traj.sigma[k]) > traj.band[k])) continue;
        if (sign(traj.sigma[k + 1]) != sign(traj.sigma[k])) {
            ++rep.crossings;
            continue;
        }
        ++rep.checked;
        if (traj.V[k + 1] > traj.V[k]) rep.violations.push_back(k);
    }
    return rep;
}

struct Metrics {
    std::size_t event_count = 0;
    std::size_t step_count = 0;  ///< grid points, i.e. updates a time-triggered loop performs
    double event_ratio = 0.0;
    std::optional<double> min_gap, mean_gap, max_gap;
    std::optional<double> eta_hat;
    std::size_t reachability_violations = 0;
    std::size_t lyapunov_violations = 0;
    double steady_x1_min = 0.0, steady_x1_max = 0.0;  ///< final 20% of the horizon
    double tracking_rmse = 0.0;                       ///< of e2
    double eps_inf = 0.0;                             ///< max ||x(t) - x(t_k)||
    double L_bar = 0.0;
    std::optional<double> min_zeno_bound;
};

/// Largest drift of the state away from its last update snapshot.
[[nodiscard]] inline double max_discretization_error(const Trajectory& traj) {
    double worst = 0.0;
    std::optional<DimlessState> snapshot;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const DimlessState x = traj.state(k);
        if (snapshot) worst = std::max(worst, norm(x - *snapshot));
        if (traj.event[k]) snapshot = x;
    }
    return worst;
}

[[nodiscard]] inline Metrics compute_metrics(const Trajectory& traj, const EventLog& log) {
    Metrics m;
    m.event_count = log.size();
    m.step_count = traj.size();
    m.event_ratio = m.step_count ? static_cast<double>(m.event_count) / static_cast<double>(m.step_count) : 0.0;
    if (!log.gaps.empty()) {
        m.min_gap = *std::min_element(log.gaps.begin(), log.gaps.end());
        m.max_gap = *std::max_element(log.gaps.begin(), log.gaps.end());
        double sum = 0.0;
        for (double g : log.gaps) sum += g;
        m.mean_gap = sum / static_cast<double>(log.gaps.size());
    }
    if (traj.size() == 0) return m;

    const auto reach = verify_reachability(traj);
    if (reach.applicable) m.eta_hat = reach.eta_hat;
    m.reachability_violations = reach.violations.size();
    m.lyapunov_violations = verify_lyapunov_decrease(traj).violations.size();

    const std::size_t tail = traj.size() - std::max<std::size_t>(1, traj.size() / 5);
    const auto [lo, hi] = std::minmax_element(traj.x1.begin() + static_cast<std::ptrdiff_t>(tail), traj.x1.end());
    m.steady_x1_min = *lo;
    m.steady_x1_max = *hi;

    double sq = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double e2 = traj.x2[k] - traj.x2ref[k];
        sq += e2 * e2;
    }
    m.tracking_rmse = std::sqrt(sq / static_cast<double>(traj.size()));
    m.eps_inf = max_discretization_error(traj);

    if (!log.bound_at_event.empty()) {
        m.min_zeno_bound = *std::min_element(log.bound_at_event.begin(), log.bound_at_event.end());
    }
    return m;
}

struct InvariantCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    Trajectory trajectory;
    EventLog events;
    Metrics metrics;
    LipschitzEstimate lipschitz;
    ReachabilityReport reachability;
    LyapunovReport lyapunov;
    std::vector<std::string> diagnostics;  ///< non-fatal warnings
    bool event_triggered = true;
    double h = 0.0;
};

namespace detail {

enum class UpdatePolicy { on_event, every_step };

inline constexpr double kCompositionWarnLimit = 1.1;

/// Smallest box holding both `base` and every trajectory state.
inline StateBox cover(StateBox base, const Trajectory& traj) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
        base.x1_min = std::min(base.x1_min, traj.x1[k]);
        base.x1_max = std::max(base.x1_max, traj.x1[k]);
        base.x2_min = std::min(base.x2_min, traj.x2[k]);
        base.x2_max = std::max(base.x2_max, traj.x2[k]);
    }
    return base;
}

inline RunResult run(const SimConfig& cfg, UpdatePolicy policy) {
    validate(cfg);
    const Disturbance dist = active_disturbance(cfg);
    const ReferenceSignal ref = active_reference(cfg);
    const DimlessParams& p = cfg.plant;
    const SlidingParams& sp = cfg.sliding;
    const TriggerParams& tp = cfg.trigger;
    const double lambda_min = std::min(std::abs(sp.lambda1), std::abs(sp.lambda2));

    RunResult res;
    res.event_triggered = policy == UpdatePolicy::on_event;
    res.h = cfg.h;
    const std::size_t n = step_count(cfg);
    Trajectory& tr = res.trajectory;
    tr.reserve(n + 1);

    DimlessState x = cfg.x0;
    HeldControl held;
    bool warned_composition = false;

    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.h;
        bool fire = false;
        double dl = 0.0;
        if (k == 0) {
            held = event_control_update(x, t, p, dist, ref, sp);
            dl = delta(error_state(x, t, held.u, p, dist, ref), t, tp);
            fire = true;
        } else {
            dl = delta(error_state(x, t, held.u, p, dist, ref), t, tp);
            fire = policy == UpdatePolicy::every_step || should_trigger(dl);
            if (fire) held = event_control_update(x, t, p, dist, ref, sp);
        }
        if (fire) res.events.record(t, dl, x);

        const double s = sigma(x, t, ref, sp);
        tr.t.push_back(t);
        tr.x1.push_back(x.x1);
        tr.x2.push_back(x.x2);
        tr.x1ref.push_back(ref.x1(t));
        tr.x2ref.push_back(ref.x2(t));
        tr.u.push_back(held.u);
        tr.sigma.push_back(s);
        tr.sigma_dot.push_back(sigma_rate(x, t, held.u, p, dist, ref, sp));
        tr.delta.push_back(dl);
        tr.event.push_back(fire ? 1 : 0);
        tr.V.push_back(0.5 * s * s);
        tr.band.push_back(threshold(t, tp) / lambda_min);

        if (!warned_composition && x.x1 > kCompositionWarnLimit) {
            warned_composition = true;
            std::ostringstream os;
            os << "composition x1=" << x.x1 << " exceeds " << kCompositionWarnLimit << " at t=" << t;
            res.diagnostics.push_back(os.str());
        }

        if (k == n) break;
        x = rk4_step(x, held.u, t, cfg.h, p, dist);
        if (!is_finite(x)) {
            std::ostringstream os;
            os << "state became non-finite after step " << k << " (t=" << t << ", u=" << held.u
               << ", last finite x=(" << tr.x1.back() << ", " << tr.x2.back() << "))";
            throw NonfiniteStateError(os.str());
        }
    }

    res.lipschitz = estimate_lipschitz(p, cover(cfg.lipschitz_box, tr), cfg.lipschitz_samples);
    const double eps_inf = max_discretization_error(tr);
    res.events.bound_at_event.reserve(res.events.size());
    for (const DimlessState& xk : res.events.state_at_event) {
        res.events.bound_at_event.push_back(eps_inf > 0.0 ? zeno_bound(xk, eps_inf, res.lipschitz, p, sp)
                                                          : std::numeric_limits<double>::quiet_NaN());
    }
    res.metrics = compute_metrics(tr, res.events);
    res.metrics.L_bar = res.lipschitz.L_bar;
    res.reachability = verify_reachability(tr);
    res.lyapunov = verify_lyapunov_decrease(tr);
    return res;
}

}  // namespace detail

/// Control recomputed only when the triggering rule fires (and at t = 0).
[[nodiscard]] inline RunResult run_event_triggered(const SimConfig& cfg) {
    return detail::run(cfg, detail::UpdatePolicy::on_event);
}

/// Baseline: control recomputed at every grid point.
[[nodiscard]] inline RunResult run_time_triggered(const SimConfig& cfg) {
    return detail::run(cfg, detail::UpdatePolicy::every_step);
}

/// Reference loop without any hold: the continuous law is evaluated inside
/// every RK4 stage. Returns the grid states only.
[[nodiscard]] inline std::vector<DimlessState> run_continuous_law(const SimConfig& cfg) {
    validate(cfg);
    const Disturbance dist = active_disturbance(cfg);
    const ReferenceSignal ref = active_reference(cfg);
    const DimlessParams& p = cfg.plant;
    const SlidingParams& sp = cfg.sliding;
    const std::size_t n = step_count(cfg);

    std::vector<DimlessState> xs;
    xs.reserve(n + 1);
    DimlessState x = cfg.x0;
    xs.push_back(x);
    const auto rhs = [&](double tau, DimlessState y) {
        return state_derivative(y, continuous_control(y, tau, p, dist, ref, sp), tau, p, dist);
    };
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * cfg.h;
        x = rk4_step(x, t, cfg.h, rhs);
        if (!is_finite(x)) throw NonfiniteStateError("continuous-law state became non-finite at t=" + std::to_string(t));
        xs.push_back(x);
    }
    return xs;
}

/// Post-run self-checks. A run is healthy iff all of them pass.
[[nodiscard]] inline std::vector<InvariantCheck> check_invariants(const RunResult& r) {
    std::vector<InvariantCheck> out;
    const Trajectory& tr = r.trajectory;
    const EventLog& log = r.events;
    auto add = [&out](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok, std::move(detail)});
    };

    {
        // gaps come from differences of k*h, so allow rounding of the subtraction
        const double min_gap = r.metrics.min_gap.value_or(std::numeric_limits<double>::infinity());
        std::ostringstream os;
        os << "min_gap=" << min_gap << " h=" << r.h;
        add("min_gap_at_least_h", min_gap >= r.h * (1.0 - 1e-9), os.str());
    }
    {
        bool ok = log.bound_at_event.size() == log.size();
        double lowest = std::numeric_limits<double>::infinity();
        for (double b : log.bound_at_event) {
            ok = ok && b > 0.0;
            lowest = std::min(lowest, b);
        }
        std::ostringstream os;
        os << "min_bound=" << lowest << " L_bar=" << r.lipschitz.L_bar;
        add("zeno_bound_positive", ok, os.str());
    }
    {
        const auto& rep = r.reachability;
        std::ostringstream os;
        os << "samples=" << rep.samples << " eta_hat=" << rep.eta_hat << " violations=" << rep.violations.size();
        add("reachability", !rep.applicable || (rep.eta_hat > 0.0 && rep.violations.empty()), os.str());
    }
    {
        std::ostringstream os;
        os << "checked=" << r.lyapunov.checked << " crossings=" << r.lyapunov.crossings
           << " violations=" << r.lyapunov.violations.size();
        add("lyapunov_decrease", r.lyapunov.violations.empty(), os.str());
    }
    {
        bool ok = true;
        std::size_t bad = 0;
        for (std::size_t k = 1; k < tr.size(); ++k) {
            if (!tr.event[k] && tr.u[k] != tr.u[k - 1]) {
                ok = false;
                ++bad;
            }
        }
        add("zoh_piecewise_constant", ok, "changes_without_event=" + std::to_string(bad));
    }
    {
        std::vector<double> flagged;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            if (tr.event[k]) flagged.push_back(tr.t[k]);
        }
        add("event_flags_match_log", flagged == log.instants,
            "flags=" + std::to_string(flagged.size()) + " log=" + std::to_string(log.size()));
    }
    if (r.event_triggered) {
        std::size_t bad = 0;
        for (std::size_t k = 1; k < tr.size(); ++k) {
            if (tr.event[k] ? tr.delta[k] < 0.0 : tr.delta[k] >= 0.0) ++bad;
        }
        add("trigger_log_consistency", bad == 0, "inconsistent_samples=" + std::to_string(bad));
    }
    return out;
}

[[nodiscard]] inline bool all_passed(const std::vector<InvariantCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

}  // namespace etsmc
