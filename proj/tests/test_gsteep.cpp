#include <doctest.h>

#include <cmath>

#include "steep/channel.hpp"
#include "steep/errors.hpp"
#include "steep/gsteep.hpp"
#include "steep/rng.hpp"

using namespace steep;

namespace {

SisoSnr lumped(const ChannelSet& cs, const PowerConfig& pw) {
  SisoSnr s;
  s.a = pw.p_a * cs.h_ba.squaredNorm();
  s.b = pw.p_b * cs.h_ab.squaredNorm();
  s.alpha = pw.p_a * cs.h_ea.squaredNorm() / s.a;
  s.beta = pw.p_b * cs.h_eb.squaredNorm() / s.b;
  return s;
}

}  // namespace

TEST_CASE("effective_probe_stats") {
  SUBCASE("vanishing probe power") {
    Matrix h(1, 2);
    h << Complex(1e-9, 0), Complex(0, 1e-9);
    const ProbeStats st = effective_probe_stats(h);
    CHECK(st.r_dp(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.r_phat(0) <= 1e-17);
  }
  SUBCASE("scalar channel matches the closed form") {
    const double a = 3.7;
    Matrix h(1, 1);
    h(0, 0) = std::sqrt(a);
    const ProbeStats st = effective_probe_stats(h);
    CHECK(st.r_dp(0) == doctest::Approx(1.0 / (a + 1.0)).epsilon(1e-14));
    CHECK(st.r_phat(0) == doctest::Approx(a / (a + 1.0)).epsilon(1e-14));
  }
  SUBCASE("construction invariants") {
    const ChannelSet cs = sample_channels(3, 2, 1, 4);
    const ScaledChannelSet s = scale_channels(cs, {6.0, 2.0});
    const ProbeStats st = effective_probe_stats(s.h_ba_p);
    CHECK((st.v_ba.adjoint() * st.v_ba - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          1e-10);
    for (int i = 0; i < 2; ++i) {
      CHECK(st.r_phat(i) + st.r_dp(i) == 1.0);  // exact by construction
      CHECK(st.r_dp_prime(i) == st.r_phat(i) * st.r_dp(i));
      CHECK(st.r_phat(i) >= 0.0);
      CHECK(st.r_phat(i) < 1.0);
    }
  }
  SUBCASE("role direction enforced") {
    Matrix tall(3, 2);
    tall.setOnes();
    CHECK_THROWS_AS(effective_probe_stats(tall), UnsupportedConfig);
  }
  SUBCASE("rank-deficient channel rejected") {
    Matrix h(2, 3);
    h.row(0) << 1.0, 2.0, Complex(0, 1);
    h.row(1) = 2.0 * h.row(0);
    CHECK_THROWS_AS(effective_probe_stats(h), SingularChannel);
  }
}

TEST_CASE("alice_capacity") {
  const ChannelSet cs = sample_channels(3, 2, 2, 21);
  const ScaledChannelSet s = scale_channels(cs, {4.0, 9.0});
  const ProbeStats st = effective_probe_stats(s.h_ba_p);
  SUBCASE("zero return channel") {
    const CapacityTerms t = alice_capacity(Matrix::Zero(3, 2), st);
    CHECK(t.capacity == 0.0);
    CHECK(t.num == doctest::Approx(1.0));
    CHECK(t.den == doctest::Approx(1.0));
  }
  SUBCASE("explicit zero-residual limit") {
    const CapacityTerms t = alice_capacity(s.h_ab_pp, RealVector::Zero(2));
    Matrix g = s.h_ab_pp.adjoint() * s.h_ab_pp;
    g.diagonal().array() += 1.0;
    CHECK(t.capacity == doctest::Approx(log2det_pd(hermitize(g))).epsilon(1e-12));
  }
  SUBCASE("equals -log2 det of the direct MSE matrix") {
    const CapacityTerms t = alice_capacity(s.h_ab_pp, st);
    const Matrix gram = s.h_ab_pp.adjoint() * s.h_ab_pp;
    Matrix lhs = gram * Matrix((st.r_dp_prime.array() + 1.0).matrix().cast<Complex>().asDiagonal());
    lhs.diagonal().array() += 1.0;
    Matrix rhs = gram * Matrix(st.r_dp_prime.cast<Complex>().asDiagonal());
    rhs.diagonal().array() += 1.0;
    const Matrix mse = lhs.inverse() * rhs;
    const double direct = -std::log2(std::abs(mse.determinant()));
    CHECK(std::abs(t.capacity - direct) <= 1e-9);
  }
}

TEST_CASE("eve_capacity") {
  const ChannelSet cs = sample_channels(3, 2, 2, 22);
  const ScaledChannelSet s = scale_channels(cs, {4.0, 9.0});
  const ProbeStats st = effective_probe_stats(s.h_ba_p);
  SUBCASE("Eve deaf in phase 2") {
    const EveCapacityTerms t = eve_capacity(Matrix::Zero(2, 2), s.h_ea_p, st);
    CHECK(t.terms.capacity == 0.0);
  }
  SUBCASE("Eve deaf in phase 1 leaves full probe uncertainty") {
    const EveCapacityTerms t = eve_capacity(s.h_eb_pp, Matrix::Zero(2, 3), st);
    const Matrix expect = Matrix(st.r_phat.cast<Complex>().asDiagonal());
    CHECK((t.r_dphat_e - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("matches the direct joint-Gaussian block covariance") {
    const EveCapacityTerms t = eve_capacity(s.h_eb_pp, s.h_ea_p, st);
    const int n_e = 2, n_b = 2;
    Matrix a = s.h_ea_p * s.h_ea_p.adjoint();
    a.diagonal().array() += 1.0;
    Matrix mid = s.h_eb_pp;
    for (int j = 0; j < n_b; ++j) mid.col(j) *= st.r_phat(j) + 1.0;
    Matrix b = mid * s.h_eb_pp.adjoint();
    b.diagonal().array() += 1.0;
    Matrix vr = st.v_ba;
    for (int j = 0; j < n_b; ++j) vr.col(j) *= st.r_phat(j);
    const Matrix c = s.h_ea_p * vr * s.h_eb_pp.adjoint();
    Matrix big(2 * n_e, 2 * n_e);
    big << a, c, c.adjoint(), b;
    Matrix cross = Matrix::Zero(2 * n_e, n_b);
    cross.bottomRows(n_e) = s.h_eb_pp;
    const Matrix mse =
        Matrix::Identity(n_b, n_b) - cross.adjoint() * big.inverse() * cross;
    const double direct = -std::log2(std::abs(mse.determinant()));
    CHECK(std::abs(t.terms.capacity - direct) <= 1e-9);
  }
  SUBCASE("residual covariance eigenvalues stay in [0, r_phat]") {
    StreamRng rng(5, 0);
    for (int k = 0; k < 20; ++k) {
      const ChannelSet c2 = sample_channels(2 + k % 3, 1 + k % 2, 1 + k % 3, 600 + k);
      const ScaledChannelSet s2 =
          scale_channels(c2, {0.5 + 30.0 * rng.next_unit(), 0.5 + 30.0 * rng.next_unit()});
      const ProbeStats st2 = effective_probe_stats(s2.h_ba_p);
      const EveCapacityTerms t = eve_capacity(s2.h_eb_pp, s2.h_ea_p, st2);
      Eigen::SelfAdjointEigenSolver<Matrix> es(t.r_dphat_e);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
      Matrix diff = Matrix(st2.r_phat.cast<Complex>().asDiagonal()) - t.r_dphat_e;
      Eigen::SelfAdjointEigenSolver<Matrix> es2(hermitize(diff));
      CHECK(es2.eigenvalues().minCoeff() >= -1e-10);
      // probe error covariances are MMSE residuals of unit-variance targets
      for (int i = 0; i < st2.n_b(); ++i) {
        CHECK(st2.r_dp(i) >= 0.0);
        CHECK(st2.r_dp(i) <= 1.0);
        CHECK(st2.r_dp_prime(i) >= 0.0);
        CHECK(st2.r_dp_prime(i) <= 1.0);
      }
    }
  }
}

TEST_CASE("gsteep_secrecy_rate") {
  SUBCASE("no eavesdropper") {
    ChannelSet cs = sample_channels(2, 2, 2, 30);
    cs.h_ea.setZero();
    cs.h_eb.setZero();
    const SecrecyBreakdown b = gsteep_secrecy_rate(cs, {3.0, 8.0});
    CHECK(b.c_eve == 0.0);
    CHECK(b.r_s == b.c_user);
  }
  SUBCASE("breakdown invariants") {
    const ChannelSet cs = sample_channels(3, 2, 2, 31);
    const SecrecyBreakdown b = gsteep_secrecy_rate(cs, {5.0, 11.0});
    CHECK(b.r_s == std::max(b.c_user - b.c_eve, 0.0));
    CHECK(b.num_user >= 1.0 - 1e-12);
    CHECK(b.den_user >= 1.0 - 1e-12);
    CHECK(b.num_eve >= 1.0 - 1e-12);
    CHECK(b.den_eve >= 1.0 - 1e-12);
    CHECK(b.c_user == doctest::Approx(std::log2(b.num_user / b.den_user)).epsilon(1e-9));
    CHECK(b.c_eve == doctest::Approx(std::log2(b.num_eve / b.den_eve)).epsilon(1e-9));
  }
  SUBCASE("positive rate under echo-power dominance") {
    // (2,1,2) with p_B/p_A = 100 and a strong probe link
    const ChannelSet cs = sample_channels(2, 1, 2, 32);
    const double pa = 1000.0 / cs.h_ba.squaredNorm() * cs.n_a;  // p_A |h|^2/n_A = 30 dB
    const SecrecyBreakdown b = gsteep_secrecy_rate(cs, {pa, 100.0 * pa});
    CHECK(b.r_s > 0.0);
  }
}

TEST_CASE("single-stream and siso reductions agree with the matrix path") {
  StreamRng rng(17, 0);
  for (int k = 0; k < 12; ++k) {
    const int n_a = 1 + k % 4;
    const int n_e = 1 + k % 3;
    const ChannelSet cs = sample_channels(n_a, 1, n_e, 700 + k);
    const PowerConfig pw{0.3 + 40.0 * rng.next_unit(), 0.3 + 150.0 * rng.next_unit()};
    const SecrecyBreakdown full = gsteep_secrecy_rate(cs, pw);
    const SecrecyBreakdown cor = single_stream_breakdown(cs, pw);
    CHECK(std::abs(full.c_user - cor.c_user) <= 1e-9);
    CHECK(std::abs(full.c_eve - cor.c_eve) <= 1e-9);
    CHECK(std::abs(full.r_s - cor.r_s) <= 1e-9);
    if (n_a == 1) {
      const SecrecyBreakdown siso = siso_secrecy_rate(lumped(cs, pw));
      CHECK(std::abs(full.c_user - siso.c_user) <= 1e-9);
      CHECK(std::abs(full.c_eve - siso.c_eve) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(single_stream_breakdown(sample_channels(2, 2, 2, 3), {1.0, 1.0}),
                  InvalidArgument);
}

TEST_CASE("single-stream special cases") {
  SUBCASE("Eve deaf in phase 1: t vanishes") {
    ChannelSet cs = sample_channels(2, 1, 2, 41);
    cs.h_ea.setZero();
    const PowerConfig pw{3.0, 10.0};
    const SecrecyBreakdown b = single_stream_breakdown(cs, pw);
    const double s_ba = pw.p_a / cs.n_a * cs.h_ba.squaredNorm();
    const double s_eb = pw.p_b * cs.h_eb.squaredNorm();
    const double sig2 = s_ba / (s_ba + 1.0);
    const double expect = std::log2(1.0 + (s_eb / 2.0) / (sig2 * s_eb / 2.0 + 1.0));
    CHECK(b.c_eve == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("n_a = 1: t reduces to sigma^4 S_EA/(S_EA+1)") {
    const ChannelSet cs = sample_channels(1, 1, 3, 42);
    const PowerConfig pw{4.0, 12.0};
    const SecrecyBreakdown b = single_stream_breakdown(cs, pw);
    const double s_ba = pw.p_a * cs.h_ba.squaredNorm();
    const double s_ea = pw.p_a * cs.h_ea.squaredNorm();
    const double s_eb = pw.p_b * cs.h_eb.squaredNorm();
    const double sig2 = s_ba / (s_ba + 1.0);
    const double t = sig2 * sig2 * s_ea / (s_ea + 1.0);
    const double expect = std::log2(1.0 + (s_eb / 2.0) / ((sig2 - t) * s_eb / 2.0 + 1.0));
    CHECK(b.c_eve == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("secret_key_capacity") {
  SUBCASE("no probe channel") {
    const ChannelSet cs = sample_channels(2, 2, 2, 50);
    const ScaledChannelSet s = scale_channels(cs, {3.0, 1.0});
    CHECK(secret_key_capacity(Matrix::Zero(2, 2), s.h_ea_p) == 0.0);
  }
  SUBCASE("scalar case a=1, alpha=1") {
    Matrix hb(1, 1), he(1, 1);
    hb(0, 0) = 1.0;
    he(0, 0) = 1.0;
    CHECK(secret_key_capacity(hb, he) ==
          doctest::Approx(0.5849625007211562).epsilon(1e-14));
  }
  SUBCASE("equals the entropy-difference form") {
    const ChannelSet cs = sample_channels(3, 2, 2, 51);
    const ScaledChannelSet s = scale_channels(cs, {7.0, 1.0});
    const double ck = secret_key_capacity(s.h_ba_p, s.h_ea_p);
    // h(y_B | y_EA) - h(y_B | x_A) from the assembled joint covariance
    Matrix cov_b = s.h_ba_p * s.h_ba_p.adjoint();
    cov_b.diagonal().array() += 1.0;
    Matrix cov_e = s.h_ea_p * s.h_ea_p.adjoint();
    cov_e.diagonal().array() += 1.0;
    const Matrix cross = s.h_ba_p * s.h_ea_p.adjoint();
    const Matrix cond = cov_b - cross * cov_e.inverse() * cross.adjoint();
    CHECK(std::abs(ck - log2det_pd(hermitize(cond))) <= 1e-9);
  }
}

TEST_CASE("siso closed forms") {
  SUBCASE("no echo power") { CHECK(siso_secrecy_rate({3.0, 0.0, 1.0, 1.0}).r_s == 0.0); }
  SUBCASE("positive above the echo threshold") {
    const double bbar = siso_threshold_b(100.0, 2.0, 2.0);
    CHECK(bbar == doctest::Approx(205.0401).epsilon(1e-6));
    CHECK(bbar < 1000.0);
    CHECK(siso_secrecy_rate({100.0, 1000.0, 2.0, 2.0}).r_s > 0.0);
  }
  SUBCASE("beta = 1 means positive at any echo power") {
    CHECK(siso_threshold_b(2.0, 3.0, 1.0) == 0.0);
    for (double b : {0.01, 1.0, 100.0}) {
      CHECK(siso_secrecy_rate({0.7, b, 3.0, 1.0}).r_s > 0.0);
    }
  }
  SUBCASE("threshold arithmetic and sign change") {
    const double bbar = siso_threshold_b(1.0, 1.0, 2.0);
    CHECK(bbar == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(siso_secrecy_rate({1.0, 8.0 - 1e-6, 1.0, 2.0}).r_s == 0.0);
    CHECK(siso_secrecy_rate({1.0, 8.0 + 1e-6, 1.0, 2.0}).r_s > 0.0);
  }
  SUBCASE("threshold grows like 2 alpha a (beta-1)/beta at large a") {
    const double a = 1e4, alpha = 2.5, beta = 3.0;
    const double ratio = siso_threshold_b(a, alpha, beta) /
                         (2.0 * alpha * a * (beta - 1.0) / beta);
    CHECK(std::abs(ratio - 1.0) <= 0.05);
  }
  SUBCASE("infinite threshold at a = 0 with beta > 1") {
    CHECK(std::isinf(siso_threshold_b(0.0, 1.0, 2.0)));
  }
  SUBCASE("key capacity values") {
    CHECK(siso_key_capacity(0.0, 1.0) == 0.0);
    CHECK(siso_key_capacity(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(siso_key_capacity(1e6, 1.0) - 1.0) <= 1e-5);
  }
  SUBCASE("key capacity equals log2(A2/A1)") {
    for (double a : {0.3, 2.0, 50.0}) {
      for (double alpha : {0.2, 1.0, 5.0}) {
        const double a1 = a / ((a + 1.0) * (a + 1.0));
        const double a2 = a1 * (a + alpha * a + 1.0) / (alpha * a + 1.0);
        CHECK(siso_key_capacity(a, alpha) ==
              doctest::Approx(std::log2(a2 / a1)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("siso monotonicity and saturation") {
  const double a = 5.0, b = 60.0;
  double prev = 1e300;
  for (int i = 0; i < 10; ++i) {
    const double alpha = 0.2 + 0.5 * i;
    double prev_beta = 1e300;
    for (int j = 0; j < 10; ++j) {
      const double beta = 0.2 + 0.5 * j;
      const double rs = siso_secrecy_rate({a, b, alpha, beta}).r_s;
      CHECK(rs <= prev_beta + 1e-12);  // nonincreasing in beta
      prev_beta = rs;
    }
    const double at_fixed_beta = siso_secrecy_rate({a, b, alpha, 1.5}).r_s;
    CHECK(at_fixed_beta <= prev + 1e-12);  // nonincreasing in alpha
    prev = at_fixed_beta;
  }

  // beta > 1: nondecreasing in b, bounded by the b -> infinity limit
  const double alpha = 1.3, beta = 2.2;
  const double a1 = a / ((a + 1.0) * (a + 1.0));
  const double a2 = a1 * (a + alpha * a + 1.0) / (alpha * a + 1.0);
  const double limit = std::max(std::log2(a2 * (a1 + 1.0) / (a1 * (a2 + 1.0))), 0.0);
  double prev_b = -1.0;
  for (double bb = 0.5; bb < 1e8; bb *= 4.0) {
    const double rs = siso_secrecy_rate({a, bb, alpha, beta}).r_s;
    CHECK(rs >= prev_b - 1e-12);
    CHECK(rs <= limit + 1e-9);
    prev_b = rs;
  }
}

TEST_CASE("siso rate is not monotone in the probe SNR") {
  // rises from zero, peaks, and falls back once the echo threshold passes b
  const double b = 100.0, alpha = 1.5, beta = 2.0;
  bool rose = false, fell = false;
  double prev = siso_secrecy_rate({1e-3, b, alpha, beta}).r_s;
  for (double a = 2e-3; a <= 1e5; a *= 1.5) {
    const double rs = siso_secrecy_rate({a, b, alpha, beta}).r_s;
    if (rs > prev + 1e-12) rose = true;
    if (rose && rs < prev - 1e-12) fell = true;
    prev = rs;
  }
  CHECK(rose);
  CHECK(fell);
}

TEST_CASE("key capacity dominates for beta >= 1") {
  StreamRng rng(23, 0);
  for (int k = 0; k < 125; ++k) {
    const double a = 0.2 * std::pow(1000.0, rng.next_unit());
    const double b = 0.5 * std::pow(2000.0, rng.next_unit());
    const double alpha = 0.1 * std::pow(100.0, rng.next_unit());
    const double beta = 1.0 + 4.0 * rng.next_unit();
    CHECK(siso_key_capacity(a, alpha) > siso_secrecy_rate({a, b, alpha, beta}).r_s);
  }
}

TEST_CASE("dof_slope") {
  const ChannelSet cs = sample_channels(4, 2, 1, 11);
  std::vector<double> grid;
  for (double p = 1e4; p <= 1.0001e8; p *= std::sqrt(10.0)) grid.push_back(p);
  const DofSlopes s = dof_slope(cs, 1.0, grid);
  CHECK(s.dof_reference == 2);
  CHECK(std::abs(s.rs_slope - 2.0) <= 0.1);
  CHECK(std::abs(s.ckey_slope - 2.0) <= 0.1);

  CHECK_THROWS_AS(dof_slope(cs, 1.0, {1.0, 2.0, 3.0}), InvalidArgument);
  CHECK_THROWS_AS(dof_slope(cs, 1.0, {1.0, 2.0, 3.0, 4.0}), InvalidArgument);
  CHECK_THROWS_AS(dof_slope(cs, 1.0, {1e6, 1e5, 1e7, 1e8}), InvalidArgument);
}

TEST_CASE("highpower_gap") {
  SUBCASE("zero probe channel has zero limit") {
    ChannelSet cs = sample_channels(2, 2, 2, 61);
    cs.h_ba.setZero();
    const HighPowerGap g = highpower_gap(cs, 100.0, 10.0);
    CHECK(g.limit == 0.0);
  }
  SUBCASE("siso anchor approaches log2(1 + 1/alpha) = 1") {
    ChannelSet cs = sample_channels(1, 1, 1, 1);
    cs.h_ba(0, 0) = 1.0;
    cs.h_ab(0, 0) = 1.0;
    cs.h_ea(0, 0) = 1.0;
    cs.h_eb(0, 0) = 1.0;
    const HighPowerGap g = highpower_gap(cs, 1e4, 1e3);
    CHECK(g.limit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g.r_s - 1.0) <= 0.02);
  }
  SUBCASE("gaps shrink as powers grow") {
    const ChannelSet cs = sample_channels(2, 2, 3, 26);
    const HighPowerGap far = highpower_gap(cs, 1e4, 1e3);
    const HighPowerGap near = highpower_gap(cs, 1e2, 1e1);
    CHECK(far.rs_gap < near.rs_gap);
    CHECK(far.ckey_gap < near.ckey_gap);
  }
  SUBCASE("dimension preconditions") {
    CHECK_THROWS_AS(highpower_gap(sample_channels(3, 2, 2, 5), 1e4, 1e3),
                    UnsupportedConfig);
  }
}
