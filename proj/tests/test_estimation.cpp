// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "isacspike/array_geometry.hpp"
#include "isacspike/config.hpp"
#include "isacspike/estimation.hpp"
#include "oracles.hpp"

using namespace isacspike;

namespace {

struct Scene {
    LinkConstants link;
    MeasurementNoiseParams params;
    BeamPlan plan;
    Vec thetas;
    Vec dists;
};

Scene default_scene() {
    ScenarioConfig cfg;
    Scene s;
    s.link = cfg.link_constants();
    s.params = cfg.noise_params();
    for (int k = 0; k < 3; ++k) {
        const double x = cfg.initial_x[k];
        const double y = cfg.initial_y[k];
        const double d = std::sqrt(x * x + y * y);
        const double theta = std::acos(-x / d);
        s.thetas.push_back(theta);
        s.dists.push_back(d);
        s.plan.beams.push_back(steering(theta, 32).elements);
        s.plan.powers_w.push_back(cfg.p_max_w() / 3.0);
    }
    return s;
}

}  // namespace

TEST_CASE("noise_variances single-vehicle matched beam collapses to the noise floor") {
    Scene s = default_scene();
    s.plan.beams.resize(1);
    s.plan.powers_w.resize(1);
    s.thetas.resize(1);
    s.dists.resize(1);
    const MeasurementNoise n = noise_variances(0, s.plan, s.thetas, s.dists, s.link, s.params);
    const double beta2 = std::norm(s.link.fading / (2.0 * s.dists[0]));
    const double signal = 1024.0 * s.plan.powers_w[0] * beta2;
    CHECK(n.var_delay ==
          doctest::Approx(1e-18 * s.link.noise_sense_w / signal).epsilon(1e-9));
    CHECK(n.var_doppler == doctest::Approx(4e6 * s.link.noise_sense_w / signal).epsilon(1e-9));
    CHECK(n.var_echo == doctest::Approx(s.link.matched_gain * s.link.noise_sense_w));
    CHECK(!n.capped);

    // Doubling the power halves both variances.
    Scene twice = s;
    twice.plan.powers_w[0] *= 2.0;
    const MeasurementNoise n2 =
        noise_variances(0, twice.plan, twice.thetas, twice.dists, twice.link, twice.params);
    CHECK(n2.var_delay == doctest::Approx(n.var_delay / 2.0).epsilon(1e-9));
    CHECK(n2.var_doppler == doctest::Approx(n.var_doppler / 2.0).epsilon(1e-9));
}

TEST_CASE("noise_variances equals alpha^2 over the sensing SINR") {
    const Scene s = default_scene();
    for (std::size_t k = 0; k < 3; ++k) {
        const double sinr = sensing_sinr(k, s.plan, s.thetas, s.dists, s.link);
        const MeasurementNoise n = noise_variances(k, s.plan, s.thetas, s.dists, s.link, s.params);
        CHECK(n.var_delay == doctest::Approx(1e-18 / sinr).epsilon(1e-9));
        CHECK(n.var_doppler == doctest::Approx(4e6 / sinr).epsilon(1e-9));
    }
}

TEST_CASE("noise_variances caps when the beam misses") {
    Scene s = default_scene();
    // Steer vehicle 0's beam at a Dirichlet null of its own angle.
    const double c0 = std::cos(s.thetas[0]);
    const double null_theta = std::acos(c0 - 2.0 / 32.0);
    s.plan.beams[0] = steering(null_theta, 32).elements;
    const MeasurementNoise n = noise_variances(0, s.plan, s.thetas, s.dists, s.link, s.params);
    CHECK(n.capped);
    CHECK(crlb_d(n) == doctest::Approx(kCrlbDistCap));
}

TEST_CASE("fim constant-slope entries") {
    const Scene s = default_scene();
    MeasurementNoise noise;
    noise.var_delay = 1e-18;
    noise.var_doppler = 1.0;
    noise.var_echo = 1e-10;
    const FisherInfo f = fim(s.thetas[0], s.dists[0], s.plan.beams[0], 1.0, s.link, noise);
    CHECK(f.info_delay == doctest::Approx(4.0 / (kSpeedOfLight * kSpeedOfLight) * 1e18)
                              .epsilon(1e-12));
    CHECK(f.info_delay == doctest::Approx(44.504).epsilon(1e-3));
}

TEST_CASE("fim flags the broadside Doppler singularity") {
    const Scene s = default_scene();
    MeasurementNoise noise;
    noise.var_delay = 1e-18;
    noise.var_doppler = 1.0;
    noise.var_echo = 1e-10;
    const CVec beam = steering(kPi / 2.0, 32).elements;
    const FisherInfo f = fim(kPi / 2.0, 10.0, beam, 1.0, s.link, noise);
    CHECK(f.doppler_singular);
    CHECK(f.info_doppler == doctest::Approx(0.0));
}

TEST_CASE("fim matches the numerical likelihood-curvature oracle") {
    Rng rng(42);
    const Scene base = default_scene();
    for (int trial = 0; trial < 5; ++trial) {
        const double theta = rng.uniform(0.3, kPi - 0.3);
        const double d = rng.uniform(8.0, 30.0);
        const double v = rng.uniform(10.0, 14.0);
        const double p = rng.uniform(0.5, 4.0);
        // Slightly mis-steered beam keeps the problem generic.
        const CVec beam = steering(clamp(theta + rng.uniform(-0.02, 0.02), 0.05, kPi - 0.05),
                                   32).elements;
        MeasurementNoise noise;
        noise.var_delay = rng.uniform(0.5, 2.0) * 1e-20;
        noise.var_doppler = rng.uniform(0.5, 2.0) * 1e4;
        noise.var_echo = rng.uniform(0.5, 2.0) * 1e-10;
        const FisherInfo f = fim(theta, d, beam, p, base.link, noise);
        const oracles::FimOracle o =
            oracles::numerical_fim(theta, d, v, beam, p, base.link, noise, rng, 200);
        CHECK(f.info_theta == doctest::Approx(o.info_theta).epsilon(1e-4));
        CHECK(f.info_delay == doctest::Approx(o.info_delay).epsilon(1e-4));
        CHECK(f.info_doppler == doctest::Approx(o.info_doppler).epsilon(1e-4));
    }
}

TEST_CASE("crlb_theta halves when power doubles and caps at zero information") {
    const Scene s = default_scene();
    MeasurementNoise noise;
    noise.var_delay = 1e-20;
    noise.var_doppler = 1e4;
    noise.var_echo = 1e-10;
    const CrlbValue c1 = crlb_theta(s.thetas[0], s.dists[0], s.plan.beams[0], 1.0, s.link, noise);
    const CrlbValue c2 = crlb_theta(s.thetas[0], s.dists[0], s.plan.beams[0], 2.0, s.link, noise);
    CHECK(!c1.capped);
    CHECK(c2.value == doctest::Approx(c1.value / 2.0).epsilon(1e-9));

    // A beam orthogonal to the steering derivative direction: zero-information
    // limit is forced with a null beam at the vehicle angle.
    const double c0 = std::cos(s.thetas[0]);
    const CVec null_beam = steering(std::acos(c0 - 2.0 / 32.0), 32).elements;
    MeasurementNoise wide = noise;
    wide.var_echo = 1e20;  // drown whatever tiny gain remains
    const CrlbValue capped =
        crlb_theta(s.thetas[0], s.dists[0], null_beam, 1.0, s.link, wide);
    CHECK(capped.capped);
    CHECK(capped.value == doctest::Approx(kCrlbThetaCap));
}

TEST_CASE("crlb_d algebraic inversions") {
    MeasurementNoise noise;
    noise.var_delay = 4.0 / (kSpeedOfLight * kSpeedOfLight);
    CHECK(crlb_d(noise) == doctest::Approx(1.0).epsilon(1e-12));
    noise.var_delay = 1e-16;
    CHECK(crlb_d(noise) == doctest::Approx(2.2469).epsilon(1e-4));
}

TEST_CASE("simulate_measurement is exact in the zero-noise limit") {
    const Scene s = default_scene();
    MeasurementNoise zero;
    zero.var_delay = 0.0;
    zero.var_doppler = 0.0;
    zero.var_echo = 0.0;
    Rng rng(5);
    VehicleState truth{s.thetas[1], s.dists[1], 12.0};
    const Measurement m = simulate_measurement(truth, s.plan, 1, s.link, zero, rng);
    CHECK(m.delay == doctest::Approx(2.0 * truth.d / kSpeedOfLight).epsilon(1e-15));
    CHECK(m.doppler ==
          doctest::Approx(2.0 * truth.v * std::cos(truth.theta) * s.link.carrier_hz /
                          kSpeedOfLight)
              .epsilon(1e-15));
    const oracles::MeasurementMean g = oracles::measurement_mean(
        truth.theta, truth.d, truth.v, truth.theta, truth.d, s.plan.beams[1], s.plan.powers_w[1],
        s.link);
    CHECK(std::abs(m.echo_gain - g.echo) < 1e-9 * std::abs(g.echo));
}

TEST_CASE("simulate_measurement seeded draw is reproducible") {
    const Scene s = default_scene();
    const MeasurementNoise noise =
        noise_variances(0, s.plan, s.thetas, s.dists, s.link, s.params);
    VehicleState truth{s.thetas[0], s.dists[0], 12.0};
    Rng rng_a(777);
    Rng rng_b(777);
    const Measurement a = simulate_measurement(truth, s.plan, 0, s.link, noise, rng_a);
    const Measurement b = simulate_measurement(truth, s.plan, 0, s.link, noise, rng_b);
    CHECK(a.delay == b.delay);
    CHECK(a.doppler == b.doppler);
    CHECK(a.echo_gain == b.echo_gain);
}

TEST_CASE("delay draw variance matches the requested variance") {
    const Scene s = default_scene();
    MeasurementNoise noise;
    noise.var_delay = 2.5e-18;
    noise.var_doppler = 1.0;
    noise.var_echo = 1e-10;
    VehicleState truth{s.thetas[0], s.dists[0], 12.0};
    Rng rng(9001);
    const double mean_delay = 2.0 * truth.d / kSpeedOfLight;
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Measurement m = simulate_measurement(truth, s.plan, 0, s.link, noise, rng);
        const double diff = m.delay - mean_delay;
        acc += diff * diff;
    }
    CHECK(acc / draws == doctest::Approx(noise.var_delay).epsilon(0.03));
}

TEST_CASE("estimate_state recovers the truth without noise") {
    const Scene s = default_scene();
    MeasurementNoise zero;
    Rng rng(3);
    VehicleState truth{s.thetas[2], s.dists[2], 11.0};
    const Measurement m = simulate_measurement(truth, s.plan, 2, s.link, zero, rng);
    const EstimatedVehicleState est =
        estimate_state(m, s.plan, 2, truth, EstimatedVehicleState{}, s.link, zero, rng);
    CHECK(est.d_hat == doctest::Approx(truth.d).epsilon(1e-9));
    CHECK(est.v_hat == doctest::Approx(truth.v).epsilon(1e-9));
    CHECK(est.theta_hat == doctest::Approx(truth.theta).epsilon(1e-12));
}

TEST_CASE("estimate_state distance from a pure delay") {
    const Scene s = default_scene();
    MeasurementNoise zero;
    Rng rng(4);
    Measurement m;
    m.delay = 1e-7;
    m.doppler = 0.0;
    m.echo_gain = {1.0, 0.0};
    VehicleState truth{1.0, 15.0, 12.0};
    const EstimatedVehicleState est =
        estimate_state(m, s.plan, 0, truth, EstimatedVehicleState{}, s.link, zero, rng);
    CHECK(est.d_hat == doctest::Approx(kSpeedOfLight * 1e-7 / 2.0));
    CHECK(est.d_hat == doctest::Approx(14.9896).epsilon(1e-4));
}

TEST_CASE("estimate_state angle RMSE tracks the bound") {
    const Scene s = default_scene();
    const MeasurementNoise noise =
        noise_variances(1, s.plan, s.thetas, s.dists, s.link, s.params);
    VehicleState truth{s.thetas[1], s.dists[1], 12.0};
    const CrlbValue bound =
        crlb_theta(truth.theta, truth.d, s.plan.beams[1], s.plan.powers_w[1], s.link, noise);
    Rng rng(2718);
    double sq = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const Measurement m = simulate_measurement(truth, s.plan, 1, s.link, noise, rng);
        const EstimatedVehicleState est =
            estimate_state(m, s.plan, 1, truth, EstimatedVehicleState{}, s.link, noise, rng);
        const double err = est.theta_hat - truth.theta;
        sq += err * err;
    }
    CHECK(std::sqrt(sq / draws) == doctest::Approx(std::sqrt(bound.value)).epsilon(0.03));
}

TEST_CASE("estimate_state holds velocity at broadside") {
    const Scene s = default_scene();
    MeasurementNoise zero;
    Rng rng(6);
    VehicleState truth{kPi / 2.0, 12.0, 12.0};
    BeamPlan plan = s.plan;
    plan.beams[0] = steering(kPi / 2.0, 32).elements;
    const Measurement m = simulate_measurement(truth, plan, 0, s.link, zero, rng);
    EstimatedVehicleState prev;
    prev.v_hat = 9.5;
    const EstimatedVehicleState est =
        estimate_state(m, plan, 0, truth, prev, s.link, zero, rng);
    CHECK(est.v_unreliable);
    CHECK(est.v_hat == doctest::Approx(9.5));
}

TEST_CASE("distance estimate is unbiased") {
    const Scene s = default_scene();
    const MeasurementNoise noise =
        noise_variances(0, s.plan, s.thetas, s.dists, s.link, s.params);
    VehicleState truth{s.thetas[0], s.dists[0], 12.0};
    Rng rng(1111);
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Measurement m = simulate_measurement(truth, s.plan, 0, s.link, noise, rng);
        const EstimatedVehicleState est =
            estimate_state(m, s.plan, 0, truth, EstimatedVehicleState{}, s.link, noise, rng);
        acc += est.d_hat - truth.d;
    }
    const double mean_err = acc / draws;
    const double limit = 3.0 * std::sqrt(noise.var_delay) * kSpeedOfLight / 2.0 /
                         std::sqrt(static_cast<double>(draws));
    CHECK(std::abs(mean_err) < limit);
}

TEST_CASE("crlb monotonicity in own and interfering power") {
    Rng rng(31337);
    const Scene base = default_scene();
    MeasurementNoiseParams with_interference = base.params;
    with_interference.echo_noise_includes_interference = true;
    for (int trial = 0; trial < 100; ++trial) {
        Scene s = base;
        for (auto& p : s.plan.powers_w) p = rng.uniform(0.2, 3.0);
        const std::size_t k = rng.next_u64() % 3;

        const MeasurementNoise n0 =
            noise_variances(k, s.plan, s.thetas, s.dists, s.link, with_interference);
        const double crlb_d0 = crlb_d(n0);
        const double crlb_t0 =
            crlb_theta(s.thetas[k], s.dists[k], s.plan.beams[k], s.plan.powers_w[k], s.link, n0)
                .value;

        Scene own = s;
        own.plan.powers_w[k] *= 1.5;
        const MeasurementNoise n_own =
            noise_variances(k, own.plan, own.thetas, own.dists, own.link, with_interference);
        CHECK(crlb_d(n_own) < crlb_d0);
        CHECK(crlb_theta(own.thetas[k], own.dists[k], own.plan.beams[k], own.plan.powers_w[k],
                         own.link, n_own)
                  .value < crlb_t0);

        Scene other = s;
        other.plan.powers_w[(k + 1) % 3] *= 1.5;
        const MeasurementNoise n_other =
            noise_variances(k, other.plan, other.thetas, other.dists, other.link,
                            with_interference);
        CHECK(crlb_d(n_other) > crlb_d0);
        CHECK(crlb_theta(other.thetas[k], other.dists[k], other.plan.beams[k],
                         other.plan.powers_w[k], other.link, n_other)
                  .value > crlb_t0);
    }
}

TEST_CASE("simulate_measurement frozen golden draw") {
    ScenarioConfig cfg;
    const LinkConstants link = cfg.link_constants();
    BeamPlan plan;
    plan.beams.push_back(steering(1.1071487177940904, 32).elements);
    plan.powers_w.push_back(10.0);
    MeasurementNoise noise;
    noise.var_delay = 1e-19;
    noise.var_doppler = 1e3;
    noise.var_echo = 1e-10;
    Rng rng(777);
    const VehicleState truth{1.1071487177940904, 11.180339887498949, 12.0};
    const Measurement m = simulate_measurement(truth, plan, 0, link, noise, rng);
    CHECK(m.delay == 7.448421503506132e-08);
    CHECK(m.doppler == 1140.392477454571);
    CHECK(m.echo_gain.real() == 452.54833673185283);
    CHECK(m.echo_gain.imag() == 452.54832804185941);
}
