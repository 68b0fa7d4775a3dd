#include <doctest.h>

#include <cmath>

#include "mel/edge_model.hpp"
#include "mel/rng.hpp"

using namespace mel;

namespace {

TaskSpec small_task() {
  TaskSpec t;
  t.dataset_size = 1000;
  t.feature_len = 784;
  t.bits_per_feature = 8;
  t.bits_per_weight = 32;
  t.weight_count = 3125;  // 1e5 weight bits
  t.complexity = 1e6;
  t.tau_min = 1;
  t.tau_max = 10;
  t.n_max = 1.0;
  t.t_max_s = 1.0;
  return t;
}

}  // namespace

TEST_CASE("channel_gain basics") {
  CHECK(channel_gain(1.0, 4.0, 1.0) == doctest::Approx(1.0));
  CHECK(channel_gain(2.0, 2.0, 1.0) == doctest::Approx(0.25));
  CHECK(channel_gain(10.0, 4.0, 0.5) == doctest::Approx(2.5e-5));
  CHECK_THROWS_AS(channel_gain(0.0, 4.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(channel_gain(-1.0, 4.0, 1.0), std::domain_error);
}

TEST_CASE("channel_gain strictly decreasing in distance") {
  SplitMix64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.uniform(0.5, 100.0);
    const double d2 = d1 + rng.uniform(0.01, 50.0);
    const double nu = rng.uniform(0.5, 6.0);
    const double g = rng.uniform(0.1, 3.0);
    CHECK(channel_gain(d1, nu, g) > channel_gain(d2, nu, g));
  }
}

TEST_CASE("link_rate basics and monotonicity") {
  ChannelParams ch;
  ch.bandwidth_hz = 1e6;
  ch.noise_w = 1.0;
  ch.tx_power_w = 1.0;
  CHECK(link_rate(0.0, ch) == 0.0);
  CHECK(link_rate(1.0, ch) == doctest::Approx(1e6));
  ch.bandwidth_hz = 2e6;
  CHECK(link_rate(3.0, ch) == doctest::Approx(4e6));
  CHECK_THROWS_AS(link_rate(-0.1, ch), std::domain_error);

  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    ChannelParams c2;
    c2.bandwidth_hz = rng.uniform(1e5, 1e7);
    c2.noise_w = rng.uniform(1e-12, 1e-8);
    c2.tx_power_w = rng.uniform(0.01, 1.0);
    const double h = rng.uniform(1e-9, 1e-3);
    const double dh = rng.uniform(1e-9, 1e-3);
    CHECK(link_rate(h + dh, c2) > link_rate(h, c2));
    ChannelParams c3 = c2;
    c3.tx_power_w *= 1.5;
    CHECK(link_rate(h, c3) > link_rate(h, c2));
  }
}

TEST_CASE("bits_data and bits_weights") {
  TaskSpec t = small_task();
  CHECK(bits_data(0.0, t) == 0.0);
  CHECK(bits_data(0.5, t) == doctest::Approx(3.136e6));
  CHECK_THROWS_AS(bits_data(-0.1, t), std::domain_error);
  CHECK_THROWS_AS(bits_data(1.1, t), std::domain_error);
  t.mode = Mode::FL;
  CHECK(bits_data(0.5, t) == 0.0);

  TaskSpec w = small_task();
  w.weight_count = 0;
  CHECK(bits_weights(w) == 0.0);
  w.weight_count = 1e4;
  CHECK(bits_weights(w) == doctest::Approx(3.2e5));
  w.weight_count = 1;
  w.bits_per_weight = 1;
  CHECK(bits_weights(w) == doctest::Approx(1.0));
}

TEST_CASE("phase_times") {
  TaskSpec t = small_task();
  LearnerProfile l;
  l.cpu_hz = 1e9;

  SUBCASE("zero participation, zero weights") {
    TaskSpec t0 = t;
    t0.weight_count = 0;
    const PhaseTimes pt = phase_times(0.0, 1.0, t0, l, 1e6);
    CHECK(pt.send_s == 0.0);
    CHECK(pt.upload_s == 0.0);
    CHECK(pt.compute_s == 0.0);
  }
  SUBCASE("send and upload from explicit bit counts") {
    // 1e6 data bits at n = 0.5 requires X*Gamma_d*N = 2e6.
    TaskSpec t1 = t;
    t1.dataset_size = 1000;
    t1.feature_len = 250;
    t1.bits_per_feature = 8;   // b_data(0.5) = 1e6
    t1.weight_count = 31250;   // b_weights = 1e6
    const PhaseTimes pt = phase_times(0.5, 1.0, t1, l, 1e6);
    CHECK(pt.send_s == doctest::Approx(2.0));
    CHECK(pt.upload_s == doctest::Approx(1.0));
  }
  SUBCASE("compute time") {
    const PhaseTimes pt = phase_times(0.1, 2.0, t, l, 1e6);
    CHECK(pt.compute_s == doctest::Approx(0.2));
  }
  SUBCASE("zero rate with pending bits") {
    CHECK_THROWS_AS(phase_times(0.5, 1.0, t, l, 0.0), infeasible_link_error);
  }
}

TEST_CASE("phase_energies") {
  TaskSpec t = small_task();
  LearnerProfile l;
  l.cpu_hz = 1e9;
  l.hw_mu = 1e-27;
  l.hw_xi = 2.0;
  l.recv_energy_j = 0.4;
  ChannelParams ch;
  ch.tx_power_w = 0.1;

  SUBCASE("zero participation") {
    const PhaseEnergies e = phase_energies(0.0, 1.0, t, l, ch, 0.0);
    CHECK(e.recv_j == 0.0);
    CHECK(e.compute_j == 0.0);
  }
  SUBCASE("upload energy is power times time") {
    const PhaseEnergies e = phase_energies(0.0, 1.0, t, l, ch, 1.0);
    CHECK(e.upload_j == doctest::Approx(0.1));
  }
  SUBCASE("compute energy formula") {
    TaskSpec t1 = t;
    t1.dataset_size = 1000;  // n*N = 100 at n = 0.1
    const PhaseEnergies e = phase_energies(0.1, 1.0, t1, l, ch, 0.0);
    CHECK(e.compute_j == doctest::Approx(1e-37));
  }
  SUBCASE("FL zeroes reception energy") {
    TaskSpec t1 = t;
    t1.mode = Mode::FL;
    const PhaseEnergies e = phase_energies(0.5, 1.0, t1, l, ch, 0.0);
    CHECK(e.recv_j == 0.0);
  }
}

TEST_CASE("learning_quality") {
  TaskSpec t = small_task();
  t.c1 = 1;
  t.c2 = 1;
  CHECK(learning_quality(1.0, 1.0, t) == doctest::Approx(-1.0));
  TaskSpec t2 = t;
  t2.c1 = 2;
  CHECK(learning_quality(5.0, 4.0, t2) == doctest::Approx(-0.1));
  CHECK(learning_quality(2.0, 1.0, t) > learning_quality(1.0, 1.0, t));
  CHECK_THROWS_AS(learning_quality(0.5, 1.0, t), std::domain_error);
  CHECK_THROWS_AS(learning_quality(1.0, 0.0, t), std::domain_error);
}

TEST_CASE("learning_quality concave in tau (midpoint test)") {
  SplitMix64 rng(99);
  for (int i = 0; i < 300; ++i) {
    TaskSpec t = small_task();
    t.c1 = rng.uniform(0.1, 5.0);
    t.c2 = rng.uniform(0.2, 2.0);
    const double g = std::floor(rng.uniform(1.0, 50.0));
    const double a = rng.uniform(1.0, 10.0);
    const double b = rng.uniform(1.0, 10.0);
    const double mid = 0.5 * (a + b);
    const double lhs = learning_quality(mid, g, t);
    const double rhs = 0.5 * (learning_quality(a, g, t) + learning_quality(b, g, t));
    CHECK(lhs >= rhs - 1e-12);
  }
}

TEST_CASE("compute_coefficients") {
  NormConstants norms{1.0, 1.0, 1.0, 1.0};
  LearnerProfile l;
  l.cpu_hz = 1e9;
  l.hw_mu = 1e-27;
  l.hw_xi = 2.0;
  l.recv_energy_j = 0.4;

  SUBCASE("a0 from crafted unit-SNR link") {
    // d=1, nu=4, g=1 -> h=1; P/sigma^2 = 1 -> rate = W = 1e6.
    ChannelParams ch;
    ch.bandwidth_hz = 1e6;
    ch.noise_w = 1.0;
    ch.tx_power_w = 1.0;
    TaskSpec t = small_task();  // 1e5 weight bits
    const Coefficients c = compute_coefficients(t, l, ch, norms, 0.0, 1.0);
    CHECK(c.rate_bps == doctest::Approx(1e6));
    CHECK(c.a0 == doctest::Approx(0.2));
  }
  SUBCASE("zeta0 from P = 0.1 at unit-SNR") {
    ChannelParams ch;
    ch.bandwidth_hz = 1e6;
    ch.noise_w = 0.1;
    ch.tx_power_w = 0.1;
    TaskSpec t = small_task();
    const Coefficients c = compute_coefficients(t, l, ch, norms, 0.0, 1.0);
    CHECK(c.a0 == doctest::Approx(0.2));
    CHECK(c.zeta0 == doctest::Approx(0.02));
  }
  SUBCASE("FL zeroes a1 and zeta1 exactly") {
    ChannelParams ch;
    ch.bandwidth_hz = 1e6;
    ch.noise_w = 1.0;
    ch.tx_power_w = 1.0;
    TaskSpec t = small_task();
    t.mode = Mode::FL;
    const Coefficients c = compute_coefficients(t, l, ch, norms, 1e-6, 1.0);
    CHECK(c.a1 == 0.0);
    CHECK(c.zeta1 == 0.0);
  }
  SUBCASE("with_price moves only zeta2") {
    ChannelParams ch;
    ch.bandwidth_hz = 1e6;
    ch.noise_w = 1.0;
    ch.tx_power_w = 1.0;
    TaskSpec t = small_task();
    const Coefficients c = compute_coefficients(t, l, ch, norms, 1e-6, 2.0);
    const Coefficients c2 = c.with_price(2e-6);
    CHECK(c2.a0 == c.a0);
    CHECK(c2.zeta0 == c.zeta0);
    CHECK(c2.zeta2 == doctest::Approx(c.price_slope * 2e-6 - c.energy_price_term));
  }
}

TEST_CASE("normalized_time") {
  Coefficients c;
  c.a0 = 0.2;
  c.a1 = 0.05;
  c.a2 = 0.1;
  CHECK(normalized_time(0.0, 5.0, 1.0, c) == doctest::Approx(c.a0));
  CHECK(normalized_time(0.5, 2.0, 2.0, c) == doctest::Approx(0.65));

  SplitMix64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Coefficients r;
    r.a0 = rng.uniform(0.0, 0.5);
    r.a1 = rng.uniform(0.0, 0.5);
    r.a2 = rng.uniform(0.0, 0.5);
    const double n = rng.uniform(0.0, 1.0);
    const double tau = rng.uniform(1.0, 10.0);
    const double g = std::floor(rng.uniform(1.0, 100.0));
    CHECK(normalized_time(n, tau, g, r) >= g * r.a0 - 1e-15);
  }
}
