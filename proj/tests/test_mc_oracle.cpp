#include <doctest.h>

#include <cmath>

#include "steep/channel.hpp"
#include "steep/errors.hpp"
#include "steep/mc_oracle.hpp"
#include "steep/msteep.hpp"

using namespace steep;

namespace {

const McReport& find(const std::vector<McReport>& reports, const std::string& name) {
  for (const auto& r : reports) {
    if (r.quantity == name) return r;
  }
  REQUIRE_MESSAGE(false, "missing quantity ", name);
  static McReport dummy;
  return dummy;
}

}  // namespace

TEST_CASE("mc_gsteep validates the closed forms on a small config") {
  const ChannelSet cs = sample_channels(2, 1, 2, 101);
  const PowerConfig pw{6.0, 20.0};
  const auto reports = mc_gsteep(cs, pw, 100000, 9);
  for (const auto& r : reports) {
    INFO(r.quantity, " z=", r.z_score);
    CHECK(r.pass);
    CHECK(r.gated);
    CHECK(r.std_error > 0.0);
    CHECK(r.n_samples == 100000);
  }
}

TEST_CASE("mc_gsteep is bit-reproducible and respects the sample floor") {
  const ChannelSet cs = sample_channels(1, 1, 1, 102);
  const PowerConfig pw{1.0, 1.0};
  const auto a = mc_gsteep(cs, pw, 10000, 5);
  const auto b = mc_gsteep(cs, pw, 10000, 5);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].empirical == b[i].empirical);
    CHECK(a[i].std_error == b[i].std_error);
    CHECK(a[i].z_score == b[i].z_score);
  }
  const auto c = mc_gsteep(cs, pw, 10000, 6);
  CHECK(c[0].empirical != a[0].empirical);
  CHECK_THROWS_AS(mc_gsteep(cs, pw, 9999, 5), InvalidArgument);
}

TEST_CASE("mc_gsteep near-noiseless probe drives the probe MSE to zero") {
  const ChannelSet cs = sample_channels(1, 1, 1, 103);
  const auto reports = mc_gsteep(cs, {1e10, 1.0}, 10000, 7);
  CHECK(find(reports, "gsteep/r_dp[0]").empirical <= 1e-8);
}

TEST_CASE("mc_gsteep standard errors shrink like 1/sqrt(n)") {
  const ChannelSet cs = sample_channels(2, 2, 2, 104);
  const PowerConfig pw{4.0, 9.0};
  const auto small = mc_gsteep(cs, pw, 50000, 11);
  const auto big = mc_gsteep(cs, pw, 200000, 11);
  // 4x the samples should halve the bars, within estimation noise of the bars
  double ratio_sum = 0.0;
  int count = 0;
  for (size_t i = 0; i < small.size(); ++i) {
    if (small[i].std_error > 0.0 && big[i].std_error > 0.0) {
      ratio_sum += small[i].std_error / big[i].std_error;
      ++count;
    }
  }
  const double mean_ratio = ratio_sum / count;
  CHECK(mean_ratio > 1.6);
  CHECK(mean_ratio < 2.4);
}

TEST_CASE("scaling the MMSE filter cannot reduce the empirical MSE") {
  const ChannelSet cs = sample_channels(2, 2, 2, 105);
  const PowerConfig pw{3.0, 7.0};
  const double at_opt = mc_gsteep_alice_mse_scaled_filter(cs, pw, 0.0, 200000, 3);
  const double up = mc_gsteep_alice_mse_scaled_filter(cs, pw, 0.01, 200000, 3);
  const double down = mc_gsteep_alice_mse_scaled_filter(cs, pw, -0.01, 200000, 3);
  // same sample path: the quadratic bump must show directly
  CHECK(at_opt < up);
  CHECK(at_opt < down);
}

TEST_CASE("mc_psteep matches the exact Alice error rate") {
  const SisoSnr snr{5.0, 50.0, 2.0, 2.0};
  const auto reports = mc_psteep(2, snr, 400000, 13);
  const McReport& alice = find(reports, "psteep/p_e_alice");
  CHECK(alice.gated);
  CHECK(alice.pass);
  const McReport& lin = find(reports, "psteep/p_e_eve_linearized");
  CHECK(lin.gated);
  CHECK(lin.pass);
  const McReport& prod = find(reports, "psteep/p_e_eve_product");
  CHECK_FALSE(prod.gated);  // measured second-order effect, not a formula check
  for (const char* rot :
       {"psteep/rotation_mean_re", "psteep/rotation_mean_im", "psteep/rotation_power_gap"}) {
    CHECK(find(reports, rot).pass);
  }
  CHECK_THROWS_AS(mc_psteep(2, snr, 99999, 13), InvalidArgument);
}

TEST_CASE("mc_psteep high-SNR run sees essentially no Alice errors") {
  const auto reports = mc_psteep(2, {1e4, 1e4, 1.0, 1.0}, 100000, 17);
  // at most a handful of errors in 1e5 symbols at these SNRs
  CHECK(find(reports, "psteep/p_e_alice").empirical <= 1e-4);
}

TEST_CASE("mc_psteep zero observed errors agree with a vanishing analytic rate") {
  const auto reports = mc_psteep(2, {100.0, 1000.0, 2.0, 2.0}, 100000, 21);
  const McReport& alice = find(reports, "psteep/p_e_alice");
  CHECK(alice.empirical == 0.0);
  CHECK(alice.analytic > 0.0);
  CHECK(alice.pass);  // binomial SE floor keeps z finite
  CHECK(find(reports, "psteep/p_e_eve_linearized").pass);
}

TEST_CASE("mc_msteep validates the closed forms") {
  MultiAccessNetwork net = symmetric_network(0.5, 0.3, 0.4, 0.8, 4);
  const auto reports = mc_msteep(net, 100000, 19);
  for (const auto& r : reports) {
    INFO(r.quantity, " z=", r.z_score);
    CHECK(r.pass);
  }
  // the AP-side MSE of the symmetric model is g_a/(1+g_a)
  const double mu = 0.5 / 1.5, mup = 1.0 - mu;
  const double g_a = mu * mup + 0.3;
  CHECK(find(reports, "msteep/sigma2_s1_ap").analytic ==
        doctest::Approx(g_a / (1.0 + g_a)).epsilon(1e-12));
  CHECK_THROWS_AS(mc_msteep(net, 9999, 19), InvalidArgument);
}

TEST_CASE("mc_msteep single-UE case matches the gsteep oracle targets") {
  MultiAccessNetwork net;
  net.n_a = 2;
  net.n_e = 2;
  net.p_a = 5.0;
  net.h_ea = sample_channels(2, 1, 2, 701).h_ea;
  const ChannelSet cs = sample_channels(2, 1, 2, 702);
  net.h_ue.push_back(cs.h_ba.transpose().col(0));
  net.h_ap.push_back(cs.h_ab.col(0));
  net.h_eve.push_back(cs.h_eb.col(0));
  net.p_ue.push_back(14.0);

  ChannelSet eq = cs;
  eq.h_ea = net.h_ea;
  const auto ms = mc_msteep(net, 50000, 23);
  const auto gs = mc_gsteep(eq, {net.p_a, net.p_ue[0]}, 50000, 23);
  // same closed-form targets, independently assembled
  CHECK(find(ms, "msteep/sigma2_s1_eve_joint").analytic ==
        doctest::Approx(find(gs, "gsteep/r_ds_eve[0]").analytic).epsilon(1e-10));
  CHECK(find(ms, "msteep/sigma2_s1_ap").analytic ==
        doctest::Approx(find(gs, "gsteep/r_ds_alice[0]").analytic).epsilon(1e-10));
  for (const auto& r : ms) CHECK(r.pass);
}
