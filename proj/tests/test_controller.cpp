#include "etsmc/controller.hpp"
#include "etsmc/sim.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace etsmc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const DimlessParams kP{};
const SlidingParams kS{};

// Reference with zero rates: constant targets.
ReferenceSignal flat_reference(double x1ref, double x2ref) {
    ReferenceSignal r;
    r.x1ref = x1ref;
    r.x2ss = x2ref;
    r.k1 = 0.0;
    return r;
}

}  // namespace

TEST_CASE("sliding variable", "[controller]") {
    CHECK(sigma(ErrorState{0.0, 0.0}, kS) == 0.0);
    CHECK(sigma(ErrorState{0.1, -0.05}, kS) == 0.0);
    CHECK_THAT(sigma(ErrorState{0.2, 0.3}, kS), WithinAbs(0.8, 1e-15));
}

TEST_CASE("sign convention", "[controller]") {
    CHECK(sign(0.0) == 0.0);
    CHECK(sign(-0.0) == 0.0);
    CHECK(sign(-3.2) == -1.0);
    CHECK(sign(1e-300) == 1.0);
    STATIC_REQUIRE(sign(2.0) == 1.0);
}

TEST_CASE("switching term variants", "[controller]") {
    SlidingParams sp = kS;
    CHECK(switching(0.3, sp) == 1.0);
    sp.reverse_switching = true;
    CHECK(switching(0.3, sp) == -1.0);
    sp.reverse_switching = false;
    sp.boundary_layer = 0.1;
    CHECK_THAT(switching(0.05, sp), WithinAbs(std::tanh(0.5), 1e-15));
}

TEST_CASE("drift vector", "[controller]") {
    const ReferenceSignal flat = flat_reference(0.0, 0.0);
    const DimlessState F = drift_vector({0.0, 0.0}, 0.0, kP, Disturbance::none(), flat);
    CHECK_THAT(F.x1, WithinAbs(0.078, 1e-15));
    CHECK_THAT(F.x2, WithinAbs(0.624, 1e-15));

    const ReferenceSignal startup{};  // x2ss = 2.6516, k1 = k2 = 1
    const DimlessState G = drift_vector({0.0, 0.0}, 0.0, kP, Disturbance::none(), startup);
    CHECK_THAT(G.x1, WithinAbs(0.078, 1e-15));
    CHECK_THAT(G.x2, WithinAbs(0.624 - 2.6516, 1e-14));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u1(0.0, 1.0), u2(0.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const DimlessState x{u1(rng), u2(rng)};
        const DimlessState H = drift_vector(x, 2.0, kP, Disturbance::none(), flat_reference(0.4, 1.0));
        CHECK(H.x1 == eval_f1(x, kP));
        CHECK(H.x2 == eval_f2(x, kP));
    }
}

TEST_CASE("continuous control at the origin", "[controller]") {
    const Disturbance none;
    // sigma = 0 when the reference sits at the state
    const double u0 = continuous_control({0.0, 0.0}, 0.0, kP, none, flat_reference(0.0, 0.0), kS);
    CHECK_THAT(u0, WithinAbs(-2.21, 1e-12));
    // sigma > 0 adds -(1/0.6) * 25
    const double u1 = continuous_control({0.0, 0.0}, 0.0, kP, none, flat_reference(-0.1, 0.0), kS);
    CHECK_THAT(u1, WithinAbs(-2.21 - 25.0 / 0.6, 1e-12));
    CHECK_THAT(u1, WithinAbs(-43.876, 1e-3));
}

TEST_CASE("reference signal rates are analytic", "[controller]") {
    const ReferenceSignal r{};
    CHECK(r.x2(0.0) == 0.0);
    CHECK_THAT(r.x2_rate(0.0), WithinAbs(2.6516, 1e-15));
    CHECK(r.x1_rate(10.0) == 0.0);
    for (double t : {0.1, 1.0, 3.0, 10.0}) {
        const double fd = (r.x2(t + 1e-6) - r.x2(t - 1e-6)) / 2e-6;
        CHECK_THAT(r.x2_rate(t), WithinAbs(fd, 1e-8));
    }
}

TEST_CASE("error state uses the applied input", "[controller]") {
    const ReferenceSignal r{};
    const DimlessState x{0.2, 1.0};
    const ErrorState e = error_state(x, 1.5, 3.0, kP, Disturbance::none(), r);
    const DimlessState xd = state_derivative(x, 3.0, 1.5, kP, Disturbance::none());
    CHECK(e.e1 == x.x1 - r.x1(1.5));
    CHECK(e.e2 == x.x2 - r.x2(1.5));
    CHECK(e.e1dot == xd.x1);
    CHECK(e.e2dot == xd.x2 - r.x2_rate(1.5));
}

TEST_CASE("sigma rate under the continuous law is -mu sign(sigma)", "[controller][property]") {
    const Disturbance d{{0.026, 0.1}, {0.037, 0.1}};
    const ReferenceSignal r{};
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u1(0.0, 1.0), u2(0.0, 5.0), ut(0.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const DimlessState x{u1(rng), u2(rng)};
        const double t = ut(rng);
        const double u = continuous_control(x, t, kP, d, r, kS);
        const double s = sigma(x, t, r, kS);
        const double sd = sigma_rate(x, t, u, kP, d, r, kS);
        CHECK_THAT(sd, WithinAbs(-kS.mu * sign(s), 1e-9));
        CHECK(s * sd <= 0.0);
    }
}

TEST_CASE("scaling the surface weights keeps the manifold", "[controller][property]") {
    const ReferenceSignal r{};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u1(0.0, 1.0), u2(0.0, 5.0), uc(0.01, 100.0);
    for (int i = 0; i < 200; ++i) {
        const DimlessState x{u1(rng), u2(rng)};
        SlidingParams scaled = kS;
        const double c = uc(rng);
        scaled.lambda1 *= c;
        scaled.lambda2 *= c;
        CHECK(sign(sigma(x, 1.0, r, scaled)) == sign(sigma(x, 1.0, r, kS)));
        // With mu scaled alongside, the control law is identical up to rounding.
        scaled.mu *= c;
        CHECK_THAT(continuous_control(x, 1.0, kP, Disturbance::none(), r, scaled),
                   WithinRel(continuous_control(x, 1.0, kP, Disturbance::none(), r, kS), 1e-12));
    }
}

TEST_CASE("event update coincides with the continuous law", "[controller]") {
    const Disturbance d{{0.026, 0.1}, {0.037, 0.1}};
    const ReferenceSignal r{};
    const HeldControl h0 = event_control_update({0.0, 0.0}, 0.0, kP, d, r, kS);
    CHECK(h0.u == continuous_control({0.0, 0.0}, 0.0, kP, d, r, kS));
    CHECK(h0.t_k == 0.0);
    CHECK(h0.sigma_k == sigma({0.0, 0.0}, 0.0, r, kS));

    const HeldControl h = event_control_update({0.3, 2.0}, 4.0, kP, d, r, kS);
    CHECK(h.u == continuous_control({0.3, 2.0}, 4.0, kP, d, r, kS));
}

TEST_CASE("held control is constant until the next update", "[controller]") {
    const HeldControl h = event_control_update({0.3, 2.0}, 4.0, kP, Disturbance::none(), ReferenceSignal{}, kS);
    for (double t = 4.0; t < 5.0; t += 0.013) CHECK(h.value_at(t) == h.u);
    CHECK_THROWS_AS(h.value_at(3.999), InvalidParameterError);
}

TEST_CASE("sliding parameter validation", "[controller]") {
    SlidingParams sp = kS;
    CHECK_NOTHROW(validate(sp));
    sp.lambda2 = 0.0;
    CHECK_THROWS_AS(validate(sp), InvalidParameterError);
    sp = kS;
    sp.mu = 0.0;
    CHECK_THROWS_AS(validate(sp), InvalidParameterError);
    sp = kS;
    sp.boundary_layer = -1.0;
    CHECK_THROWS_AS(validate(sp), InvalidParameterError);
}

TEST_CASE("continuous law keeps sigma sigma_dot nonpositive near the manifold", "[controller]") {
    // Closed loop with the law evaluated inside every integrator stage.
    SimConfig cfg;
    cfg.t_end = 5.0;
    const auto xs = run_continuous_law(cfg);
    const ReferenceSignal r = active_reference(cfg);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double t = static_cast<double>(k) * cfg.h;
        const double u = continuous_control(xs[k], t, cfg.plant, Disturbance::none(), r, cfg.sliding);
        const double s = sigma(xs[k], t, r, cfg.sliding);
        CHECK(s * sigma_rate(xs[k], t, u, cfg.plant, Disturbance::none(), r, cfg.sliding) <= 0.0);
    }
}
