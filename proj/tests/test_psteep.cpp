#include <doctest.h>

#include <cmath>

#include "steep/errors.hpp"
#include "steep/psteep.hpp"
#include "steep/rng.hpp"

using namespace steep;

TEST_CASE("PskConfig") {
  CHECK_THROWS_AS(PskConfig(3), InvalidArgument);
  CHECK_THROWS_AS(PskConfig(1), InvalidArgument);
  const PskConfig bpsk(2);
  CHECK(bpsk.bits == 1);
  CHECK(bpsk.n0 == 1);
  const PskConfig psk8(8);
  CHECK(psk8.bits == 3);
  CHECK(psk8.n0 == 2);
}

TEST_CASE("Q-function sandwich bound") {
  for (double x = 0.1; x <= 8.0; x += 0.1) {
    const double phi0 = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    const double q = q_function(x);
    CHECK(q > x / (1.0 + x * x) * phi0);
    CHECK(q < phi0 / x);
  }
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.3) == doctest::Approx(0.8812908992306926).epsilon(1e-14));
  CHECK_THROWS_AS(binary_entropy(-0.1), InvalidArgument);
  // second route: h2(p) = -log2(1-p) - p*log2(p/(1-p))
  for (double p = 0.01; p < 1.0; p += 0.07) {
    const double alt = -std::log2(1.0 - p) - p * std::log2(p / (1.0 - p));
    CHECK(binary_entropy(p) == doctest::Approx(alt).epsilon(1e-12));
  }
}

TEST_CASE("psk_capacity") {
  CHECK(psk_capacity(2, 0.0) == 1.0);
  CHECK(psk_capacity(8, 0.0) == 3.0);
  CHECK(psk_capacity(2, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(psk_capacity(4, 0.01) == doctest::Approx(1.909206864104089).epsilon(1e-12));
  CHECK_THROWS_AS(psk_capacity(2, 1.5), InvalidArgument);
  CHECK_THROWS_AS(psk_capacity(2, -0.01), InvalidArgument);
}

TEST_CASE("psk_error_params") {
  SUBCASE("equal link SNRs collapse eps_a") {
    const PskErrorParams p = psk_error_params(2, {9.0, 9.0, 1.0, 1.0});
    CHECK(p.eps_a == doctest::Approx(std::sqrt(1.0 / 9.0)).epsilon(1e-14));
  }
  SUBCASE("high SNR error vanishes") {
    const PskErrorParams p = psk_error_params(2, {1e14, 1e14, 1.0, 1.0});
    CHECK(p.p_ea <= 1e-10);
  }
  SUBCASE("deaf Eve guesses") {
    const PskErrorParams p2 = psk_error_params(2, {4.0, 9.0, 0.0, 1.0});
    CHECK(p2.p_ee == doctest::Approx(0.5).epsilon(1e-15));
    const PskErrorParams p4 = psk_error_params(4, {4.0, 9.0, 0.0, 1.0});
    CHECK(p4.p_ee == doctest::Approx(1.0).epsilon(1e-15));  // n0*Q(0) clamped
  }
  SUBCASE("anchor SNRs") {
    const PskErrorParams p = psk_error_params(2, {100.0, 1000.0, 2.0, 2.0});
    CHECK(p.p_ea == doctest::Approx(9.71445050773196e-42).epsilon(1e-10));
    CHECK(p.p_ee == doctest::Approx(3.33625432859528e-30).epsilon(1e-10));
  }
  SUBCASE("degenerate links rejected") {
    CHECK_THROWS_AS(psk_error_params(2, {0.0, 1.0, 1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(psk_error_params(2, {1.0, 0.0, 1.0, 1.0}), InvalidArgument);
  }
  SUBCASE("low SNR flags the approximation") {
    CHECK(psk_error_params(4, {1.0, 1.0, 1.0, 1.0}).low_snr_warning);
    CHECK_FALSE(psk_error_params(2, {100.0, 1000.0, 2.0, 2.0}).low_snr_warning);
  }
}

TEST_CASE("psteep_secrecy_rate") {
  SUBCASE("equal effective channels sit on the zero boundary") {
    // b/a = alpha(1-1/beta) exactly: eps_a = eps_e
    const PsteepRate r = psteep_secrecy_rate(2, {1.0, 1.0, 2.0, 2.0});
    CHECK(r.r_s == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("positive under the power condition") {
    const SisoSnr snr{100.0, 1000.0, 2.0, 2.0};
    CHECK(psteep_power_condition(snr));  // 10 > 2*(1 - 1/2) = 1
    CHECK(psteep_secrecy_rate(2, snr).r_s > 0.0);
  }
  SUBCASE("M = 4 keeps the error-rate difference term") {
    const SisoSnr snr{30.0, 300.0, 2.0, 2.0};
    const PskErrorParams p = psk_error_params(4, snr);
    const PsteepRate r = psteep_secrecy_rate(4, snr);
    const double diff = (r.c_user - r.c_eve) - (r.r_s_h2 + (p.p_ee - p.p_ea));
    CHECK(std::abs(diff) <= 1e-12);
    CHECK(r.r_s == doctest::Approx(r.r_s_h2 + (p.p_ee - p.p_ea)).epsilon(1e-9));
  }
  SUBCASE("monotone in the Eve ratios") {
    double prev_alpha = -1.0;
    for (double alpha = 0.2; alpha <= 4.0; alpha += 0.4) {
      const double rs = psteep_secrecy_rate(2, {8.0, 40.0, alpha, 1.5}).r_s;
      if (prev_alpha >= 0.0) CHECK(rs <= prev_alpha + 1e-12);
      prev_alpha = rs;
    }
    double prev_beta = -1.0;
    for (double beta = 0.2; beta <= 4.0; beta += 0.4) {
      const double rs = psteep_secrecy_rate(2, {8.0, 40.0, 1.5, beta}).r_s;
      if (prev_beta >= 0.0) CHECK(rs <= prev_beta + 1e-12);
      prev_beta = rs;
    }
  }
}

TEST_CASE("psteep_power_condition") {
  CHECK(psteep_power_condition({5.0, 1.0, 10.0, 0.5}));  // beta < 1: always
  CHECK_FALSE(psteep_power_condition({1.0, 1.0, 2.0, 2.0}));  // boundary is strict
  CHECK(psteep_power_condition({1.0, 1.01, 2.0, 2.0}));

  // three-way equivalence with the effective noise ordering on random draws
  StreamRng rng(31, 0);
  for (int k = 0; k < 1000; ++k) {
    SisoSnr snr;
    snr.a = 0.5 * std::pow(600.0, rng.next_unit());
    snr.b = 0.5 * std::pow(2400.0, rng.next_unit());
    snr.alpha = 0.05 + 3.95 * rng.next_unit();
    snr.beta = 0.05 + 3.95 * rng.next_unit();
    const PskErrorParams p = psk_error_params((k % 2 == 0) ? 2 : 4, snr);
    const bool cond = psteep_power_condition(snr);
    CHECK(cond == (p.eps_a < p.eps_e));
    CHECK(cond == (p.p_ea < p.p_ee));
  }
}

TEST_CASE("error_ratio_bound") {
  SUBCASE("exponent anchor") {
    const ErrorRatioBound b = error_ratio_bound(2, {100.0, 1000.0, 2.0, 2.0});
    CHECK(std::abs(b.exponent - 26.4) <= 0.05);
    CHECK(b.exponent == doctest::Approx(26.392961876832846).epsilon(1e-12));
  }
  SUBCASE("large-echo limit of the exponent") {
    const ErrorRatioBound b = error_ratio_bound(2, {100.0, 1000.0, 1.0, 2.0});
    CHECK(b.exponent_limit_b_inf == doctest::Approx(50.0).epsilon(1e-14));
    const ErrorRatioBound huge = error_ratio_bound(2, {100.0, 1e12, 1.0, 2.0});
    CHECK(std::abs(huge.exponent - 50.0) <= 0.05);
  }
  SUBCASE("not applicable without the power condition") {
    CHECK_THROWS_AS(error_ratio_bound(2, {1.0, 1.0, 2.0, 2.0}), NotApplicable);
  }
  SUBCASE("the bound actually bounds the error-rate ratio") {
    StreamRng rng(37, 0);
    int checked = 0;
    while (checked < 1000) {
      SisoSnr snr;
      snr.a = 1.0 * std::pow(300.0, rng.next_unit());
      snr.b = 1.0 * std::pow(1000.0, rng.next_unit());
      snr.alpha = 0.1 + 3.0 * rng.next_unit();
      snr.beta = 0.1 + 3.0 * rng.next_unit();
      if (!psteep_power_condition(snr)) continue;
      const int m = (checked % 2 == 0) ? 2 : 4;
      const PskErrorParams p = psk_error_params(m, snr);
      if (p.p_ee <= 0.0) continue;  // underflowed tail, ratio undefined
      const ErrorRatioBound b = error_ratio_bound(m, snr);
      CHECK(p.p_ea / p.p_ee <= b.bound * (1.0 + 1e-12));
      ++checked;
    }
  }
}
