#include "steep/mc_oracle.hpp"

#include <cmath>
#include <limits>

#include "steep/errors.hpp"
#include "steep/psteep.hpp"
#include "steep/rng.hpp"

namespace steep {

namespace {

constexpr int kBatches = 100;
constexpr double kZMax = 3.0;

// Distinct stream salts per protocol so a report never depends on which
// other oracles ran under the same seed.
constexpr std::uint64_t kSaltG = 0x475354454550ull;
constexpr std::uint64_t kSaltP = 0x505354454550ull;
constexpr std::uint64_t kSaltM = 0x4d5354454550ull;

struct BatchPlan {
  long base = 0;
  long extra = 0;  // first `extra` batches get one more sample

  explicit BatchPlan(long n) : base(n / kBatches), extra(n % kBatches) {}
  long size(int b) const { return base + (b < extra ? 1 : 0); }
};

McReport make_report(std::string name, double analytic,
                     const std::vector<double>& batch_means,
                     const std::vector<long>& batch_sizes, bool gated,
                     double se_floor = 0.0) {
  McReport r;
  r.quantity = std::move(name);
  r.analytic = analytic;
  double wsum = 0.0, msum = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    wsum += static_cast<double>(batch_sizes[b]);
    msum += batch_means[b] * static_cast<double>(batch_sizes[b]);
    r.n_samples += batch_sizes[b];
  }
  r.empirical = msum / wsum;
  double mean = 0.0;
  for (double m : batch_means) mean += m;
  mean /= kBatches;
  double var = 0.0;
  for (double m : batch_means) var += (m - mean) * (m - mean);
  var /= (kBatches - 1);
  r.std_error = std::max(std::sqrt(var / kBatches), se_floor);
  if (r.std_error > 0.0) {
    r.z_score = (r.empirical - r.analytic) / r.std_error;
  } else {
    r.z_score = (r.empirical == r.analytic)
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
  }
  r.pass = std::abs(r.z_score) <= kZMax;
  r.gated = gated;
  return r;
}

void draw_cgauss(StreamRng& rng, Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next_cgauss();
}

// Fills the first n entries in index order; draw order is part of the
// reproducibility contract.
void draw_cgauss_head(StreamRng& rng, Vector& v, int n) {
  for (int i = 0; i < n; ++i) v(i) = rng.next_cgauss();
}

}  // namespace

std::vector<McReport> mc_gsteep(const ChannelSet& channels, const PowerConfig& powers,
                                long n_samples, std::uint64_t seed) {
  if (n_samples < 10000) throw InvalidArgument("mc_gsteep: need at least 1e4 samples");
  const ScaledChannelSet sc = scale_channels(channels, powers);
  const ProbeStats stats = effective_probe_stats(sc.h_ba_p);
  const int n_a = channels.n_a, n_b = channels.n_b, n_e = channels.n_e;

  // Bob's probe filter phat = diag(pi/(pi^2+1)) U^H y_B.
  Matrix filt_bob = stats.u_ba.adjoint();
  for (int i = 0; i < n_b; ++i) {
    const double s = stats.pi_scaled(i);
    filt_bob.row(i) *= s / (s * s + 1.0);
  }
  // Alice's message filter on the centered observation.
  Matrix mid = sc.h_ab_pp;
  for (int j = 0; j < n_b; ++j) mid.col(j) *= stats.r_dp_prime(j) + 1.0;
  Matrix cov_alice = mid * sc.h_ab_pp.adjoint();
  cov_alice.diagonal().array() += 1.0;
  const Matrix filt_alice =
      Eigen::LLT<Matrix>(hermitize(cov_alice)).solve(sc.h_ab_pp).adjoint();
  // Eve's joint filter over [y_EA; y_EB].
  Matrix big_r(2 * n_e, 2 * n_e);
  {
    Matrix a = sc.h_ea_p * sc.h_ea_p.adjoint();
    a.diagonal().array() += 1.0;
    Matrix hp = sc.h_eb_pp;
    for (int j = 0; j < n_b; ++j) hp.col(j) *= stats.r_phat(j) + 1.0;
    Matrix b = hp * sc.h_eb_pp.adjoint();
    b.diagonal().array() += 1.0;
    Matrix vr = stats.v_ba;
    for (int j = 0; j < n_b; ++j) vr.col(j) *= stats.r_phat(j);
    const Matrix c = sc.h_ea_p * vr * sc.h_eb_pp.adjoint();
    big_r.topLeftCorner(n_e, n_e) = a;
    big_r.topRightCorner(n_e, n_e) = c;
    big_r.bottomLeftCorner(n_e, n_e) = c.adjoint();
    big_r.bottomRightCorner(n_e, n_e) = b;
  }
  Matrix cross = Matrix::Zero(2 * n_e, n_b);
  cross.bottomRows(n_e) = sc.h_eb_pp;
  const Matrix filt_eve = Eigen::LDLT<Matrix>(hermitize(big_r)).solve(cross).adjoint();

  // Analytic targets.
  const CapacityTerms user = alice_capacity(sc.h_ab_pp, stats);
  const EveCapacityTerms eve = eve_capacity(sc.h_eb_pp, sc.h_ea_p, stats);
  auto mse_matrix = [n_b](const Matrix& gram, const Matrix& resid) {
    Matrix lhs = gram * resid;
    lhs.diagonal().array() += 1.0;
    Matrix mid2 = resid;
    mid2.diagonal().array() += 1.0;
    Matrix rhs = gram * mid2;
    rhs.diagonal().array() += 1.0;
    return Matrix(Eigen::PartialPivLU<Matrix>(rhs).solve(lhs));
  };
  const Matrix r_ds_alice = mse_matrix(hermitize(sc.h_ab_pp.adjoint() * sc.h_ab_pp),
                                       Matrix(stats.r_dp_prime.cast<Complex>().asDiagonal()));
  const Matrix r_ds_eve =
      mse_matrix(hermitize(sc.h_eb_pp.adjoint() * sc.h_eb_pp), eve.r_dphat_e);

  const BatchPlan plan(n_samples);
  const int nq = 4 * n_b + 2;
  std::vector<std::vector<double>> means(nq, std::vector<double>(kBatches, 0.0));
  std::vector<long> sizes(kBatches);

  Vector x_a(n_a), w(std::max({n_a, n_b, n_e})), p(n_b), y_b(n_b), phat(n_b), echo(n_b);
  Vector y_a(n_a), shat(n_b), y_ea(n_e), y_eb(n_e), msg(n_b), delta(n_b), center(n_b);
  Matrix acc_alice(n_b, n_b), acc_eve(n_b, n_b);
  for (int b = 0; b < kBatches; ++b) {
    StreamRng rng(seed, kSaltG + b);
    const long n = plan.size(b);
    sizes[b] = n;
    std::vector<double> sum(4 * n_b, 0.0);
    acc_alice.setZero();
    acc_eve.setZero();
    for (long k = 0; k < n; ++k) {
      draw_cgauss(rng, x_a);
      p.noalias() = stats.v_ba.adjoint() * x_a;
      draw_cgauss_head(rng, w, n_b);
      y_b.noalias() = sc.h_ba_p * x_a;
      y_b += w.head(n_b);
      phat.noalias() = filt_bob * y_b;
      for (int i = 0; i < n_b; ++i) {
        const Complex dp = phat(i) - p(i);
        sum[i] += std::norm(dp);
        const Complex dpp = phat(i) - stats.r_phat(i) * p(i);
        sum[n_b + i] += std::norm(dpp);
        center(i) = stats.r_phat(i) * p(i);
      }
      draw_cgauss(rng, msg);
      echo = phat + msg;
      draw_cgauss_head(rng, w, n_a);
      y_a.noalias() = sc.h_ab_pp * echo;
      y_a += w.head(n_a);
      y_a.noalias() -= sc.h_ab_pp * center;
      shat.noalias() = filt_alice * y_a;
      delta = shat - msg;
      for (int i = 0; i < n_b; ++i) sum[2 * n_b + i] += std::norm(delta(i));
      acc_alice.noalias() += delta * delta.adjoint();
      draw_cgauss_head(rng, w, n_e);
      y_ea.noalias() = sc.h_ea_p * x_a;
      y_ea += w.head(n_e);
      draw_cgauss_head(rng, w, n_e);
      y_eb.noalias() = sc.h_eb_pp * echo;
      y_eb += w.head(n_e);
      shat.noalias() = filt_eve.leftCols(n_e) * y_ea;
      shat.noalias() += filt_eve.rightCols(n_e) * y_eb;
      delta = shat - msg;
      for (int i = 0; i < n_b; ++i) sum[3 * n_b + i] += std::norm(delta(i));
      acc_eve.noalias() += delta * delta.adjoint();
    }
    for (int q = 0; q < 4 * n_b; ++q) means[q][b] = sum[q] / static_cast<double>(n);
    means[4 * n_b][b] = -log2det_pd(hermitize(acc_alice / static_cast<double>(n)));
    means[4 * n_b + 1][b] = -log2det_pd(hermitize(acc_eve / static_cast<double>(n)));
  }

  std::vector<McReport> out;
  for (int i = 0; i < n_b; ++i) {
    out.push_back(make_report("gsteep/r_dp[" + std::to_string(i) + "]", stats.r_dp(i),
                              means[i], sizes, true));
  }
  for (int i = 0; i < n_b; ++i) {
    out.push_back(make_report("gsteep/r_dp_prime[" + std::to_string(i) + "]",
                              stats.r_dp_prime(i), means[n_b + i], sizes, true));
  }
  for (int i = 0; i < n_b; ++i) {
    out.push_back(make_report("gsteep/r_ds_alice[" + std::to_string(i) + "]",
                              r_ds_alice(i, i).real(), means[2 * n_b + i], sizes, true));
  }
  for (int i = 0; i < n_b; ++i) {
    out.push_back(make_report("gsteep/r_ds_eve[" + std::to_string(i) + "]",
                              r_ds_eve(i, i).real(), means[3 * n_b + i], sizes, true));
  }
  out.push_back(make_report("gsteep/c_user", user.capacity, means[4 * n_b], sizes, true));
  out.push_back(
      make_report("gsteep/c_eve", eve.terms.capacity, means[4 * n_b + 1], sizes, true));
  return out;
}

std::vector<McReport> mc_psteep(int constellation_size, const SisoSnr& snr,
                                long n_symbols, std::uint64_t seed) {
  if (n_symbols < 100000) throw InvalidArgument("mc_psteep: need at least 1e5 symbols");
  const PskConfig cfg(constellation_size);
  const PskErrorParams params = psk_error_params(constellation_size, snr);
  const int m = cfg.size;
  const double sd_b = std::sqrt(1.0 / snr.a);
  const double sd_a = std::sqrt(1.0 / snr.b);
  const double sd_ea = snr.alpha > 0.0 ? std::sqrt(1.0 / (snr.alpha * snr.a)) : 0.0;
  const double sd_eb = snr.beta > 0.0 ? std::sqrt(1.0 / (snr.beta * snr.b)) : 0.0;
  const bool eve_deaf = snr.alpha <= 0.0 || snr.beta <= 0.0;

  // Nearest point by phase, exact ties to the lower index.
  auto detect = [m](Complex r) {
    const double x = std::arg(r) * m / (2.0 * M_PI);
    long k = static_cast<long>(std::ceil(x - 0.5));
    k %= m;
    if (k < 0) k += m;
    return static_cast<int>(k);
  };

  const BatchPlan plan(n_symbols);
  enum { kEA, kEELin, kEEProd, kRotRe, kRotIm, kRotPow, kQuantities };
  std::vector<std::vector<double>> means(kQuantities, std::vector<double>(kBatches, 0.0));
  std::vector<long> sizes(kBatches);
  for (int b = 0; b < kBatches; ++b) {
    StreamRng rng(seed, kSaltP + b);
    const long n = plan.size(b);
    sizes[b] = n;
    long err_a = 0, err_e_lin = 0, err_e_prod = 0;
    double rot_re = 0.0, rot_im = 0.0, rot_pow = 0.0;
    for (long k = 0; k < n; ++k) {
      const int th = static_cast<int>(rng.next_below(m));
      const int ph = static_cast<int>(rng.next_below(m));
      const Complex x_a = std::polar(1.0, 2.0 * M_PI * th / m);
      const Complex x_ph = std::polar(1.0, 2.0 * M_PI * ph / m);
      const Complex v_b = sd_b * rng.next_cgauss();
      const Complex v_a = sd_a * rng.next_cgauss();
      const Complex x_b = x_ph * (x_a + v_b);
      const Complex r_alice = std::conj(x_a) * (x_b + v_a);
      if (detect(r_alice) != ph) ++err_a;
      if (!eve_deaf) {
        const Complex v_ea = sd_ea * rng.next_cgauss();
        const Complex v_eb = sd_eb * rng.next_cgauss();
        const Complex r_prod = std::conj(x_a + v_ea) * (x_b + v_eb);
        if (detect(r_prod) != ph) ++err_e_prod;
        const Complex r_lin =
            x_ph + std::conj(x_a) * x_ph * v_b + std::conj(x_a) * v_eb +
            std::conj(v_ea) * x_ph * x_a;
        if (detect(r_lin) != ph) ++err_e_lin;
      }
      // Phase-keyed rotation of a circular Gaussian vs a fresh draw.
      const Complex rotated = x_a * v_b;
      const Complex fresh = sd_b * rng.next_cgauss();
      rot_re += rotated.real() - fresh.real();
      rot_im += rotated.imag() - fresh.imag();
      rot_pow += std::norm(rotated) - std::norm(fresh);
    }
    const double dn = static_cast<double>(n);
    means[kEA][b] = err_a / dn;
    means[kEELin][b] = err_e_lin / dn;
    means[kEEProd][b] = err_e_prod / dn;
    means[kRotRe][b] = rot_re / dn;
    means[kRotIm][b] = rot_im / dn;
    means[kRotPow][b] = rot_pow / dn;
  }

  // Error rates carry the exact binomial deviation as an SE floor so that
  // zero observed errors against a vanishing analytic rate reads as
  // agreement rather than an infinite z.
  auto rate_floor = [n_symbols](double p) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n_symbols));
  };
  std::vector<McReport> out;
  out.push_back(make_report("psteep/p_e_alice", params.p_ea, means[kEA], sizes, true,
                            rate_floor(params.p_ea)));
  out.push_back(make_report("psteep/p_e_eve_linearized", params.p_ee, means[kEELin],
                            sizes, !eve_deaf, rate_floor(params.p_ee)));
  // Full conjugate product: deviation from the formula is the measured
  // effect of the dropped second-order noise terms; informational only.
  out.push_back(make_report("psteep/p_e_eve_product", params.p_ee, means[kEEProd],
                            sizes, false, rate_floor(params.p_ee)));
  out.push_back(make_report("psteep/rotation_mean_re", 0.0, means[kRotRe], sizes, true));
  out.push_back(make_report("psteep/rotation_mean_im", 0.0, means[kRotIm], sizes, true));
  out.push_back(make_report("psteep/rotation_power_gap", 0.0, means[kRotPow], sizes, true));
  return out;
}

std::vector<McReport> mc_msteep(const MultiAccessNetwork& net, long n_samples,
                                std::uint64_t seed) {
  if (n_samples < 10000) throw InvalidArgument("mc_msteep: need at least 1e4 samples");
  const UeStats stats = ue_stats(net);
  const int m = net.ue_count();
  const int n_a = net.n_a, n_e = net.n_e;
  const Matrix h_ea_p = std::sqrt(net.p_a / net.n_a) * net.h_ea;

  // Analytic filters: Eve's joint weights for s_1, conditioned-chain weights
  // for each s_i, and the AP-side per-UE message filter.
  std::vector<Vector> eve_weights(m);
  std::vector<double> eve_sigma2(m);
  for (int i = 0; i < m; ++i) {
    const Matrix ri = eve_covariance(net, stats, i);
    const Vector cross = eve_cross_vector(net, i);
    eve_weights[i] = Eigen::LDLT<Matrix>(ri).solve(cross);
    eve_sigma2[i] = 1.0 - (cross.adjoint() * eve_weights[i])(0).real();
  }
  const double sigma2_joint = eve_joint_mse_ue1(net, stats).sigma2;
  std::vector<Vector> ap_weights(m);
  std::vector<double> ap_sigma2(m);
  std::vector<Vector> h_ap_scaled(m), h_eve_scaled(m), hbar(m);
  for (int i = 0; i < m; ++i) {
    h_ap_scaled[i] = std::sqrt(net.p_ue[i] / 2.0) * net.h_ap[i];
    h_eve_scaled[i] = std::sqrt(net.p_ue[i] / 2.0) * net.h_eve[i];
    hbar[i] = net.h_ue[i] / net.h_ue[i].norm();
    Matrix cov = (stats.c(i) * stats.d(i) + 1.0) * (h_ap_scaled[i] * h_ap_scaled[i].adjoint());
    cov.diagonal().array() += 1.0;
    ap_weights[i] = Eigen::LLT<Matrix>(hermitize(cov)).solve(h_ap_scaled[i]);
    ap_sigma2[i] = 1.0 - (h_ap_scaled[i].adjoint() * ap_weights[i])(0).real();
  }

  const BatchPlan plan(n_samples);
  // Quantities: joint Eve MSE for s_1, per-UE chain MSEs, per-UE AP MSEs,
  // then re/im of E{phat_i phat_j^*} for adjacent pairs.
  const int n_pairs = m - 1;
  const int nq = 1 + m + m + 2 * n_pairs;
  std::vector<std::vector<double>> means(nq, std::vector<double>(kBatches, 0.0));
  std::vector<long> sizes(kBatches);

  Vector x(n_a), w(std::max(n_a, n_e)), phat(m), msg(m), pvals(m);
  Vector y_e((m + 1) * n_e), y_cond((m + 1) * n_e);
  for (int b = 0; b < kBatches; ++b) {
    StreamRng rng(seed, kSaltM + b);
    const long n = plan.size(b);
    sizes[b] = n;
    std::vector<double> sum(nq, 0.0);
    for (long k = 0; k < n; ++k) {
      draw_cgauss(rng, x);
      for (int i = 0; i < m; ++i) {
        pvals(i) = (hbar[i].transpose() * x)(0);
        const Complex y_i = std::sqrt(stats.s_ue(i)) * pvals(i) + rng.next_cgauss();
        phat(i) = std::sqrt(stats.s_ue(i)) / (stats.s_ue(i) + 1.0) * y_i;
        msg(i) = rng.next_cgauss();
      }
      for (int i = 0; i < m; ++i) {
        draw_cgauss_head(rng, w, n_e);
        y_e.segment(i * n_e, n_e) = (phat(i) + msg(i)) * h_eve_scaled[i];
        y_e.segment(i * n_e, n_e) += w.head(n_e);
      }
      draw_cgauss_head(rng, w, n_e);
      y_e.segment(m * n_e, n_e).noalias() = h_ea_p * x;
      y_e.segment(m * n_e, n_e) += w.head(n_e);

      const Complex s1_joint = (eve_weights[0].adjoint() * y_e)(0);
      sum[0] += std::norm(s1_joint - msg(0));
      y_cond = y_e;
      for (int i = 0; i < m; ++i) {
        if (i > 0) {
          // Eve now also knows s_{i-1}: strip it from that echo block.
          y_cond.segment((i - 1) * n_e, n_e) -= msg(i - 1) * h_eve_scaled[i - 1];
        }
        const Complex si = (eve_weights[i].adjoint() * y_cond)(0);
        sum[1 + i] += std::norm(si - msg(i));
      }
      for (int i = 0; i < m; ++i) {
        draw_cgauss_head(rng, w, n_a);
        Vector y_ai = (phat(i) + msg(i) - stats.c(i) * pvals(i)) * h_ap_scaled[i];
        y_ai += w.head(n_a);
        const Complex si = (ap_weights[i].adjoint() * y_ai)(0);
        sum[1 + m + i] += std::norm(si - msg(i));
      }
      for (int i = 0; i + 1 < m; ++i) {
        const Complex prod = phat(i) * std::conj(phat(i + 1));
        sum[1 + 2 * m + 2 * i] += prod.real();
        sum[1 + 2 * m + 2 * i + 1] += prod.imag();
      }
    }
    for (int q = 0; q < nq; ++q) means[q][b] = sum[q] / static_cast<double>(n);
  }

  std::vector<McReport> out;
  out.push_back(make_report("msteep/sigma2_s1_eve_joint", sigma2_joint, means[0], sizes, true));
  for (int i = 0; i < m; ++i) {
    out.push_back(make_report("msteep/sigma2_s" + std::to_string(i + 1) + "_eve_chain",
                              eve_sigma2[i], means[1 + i], sizes, true));
  }
  for (int i = 0; i < m; ++i) {
    out.push_back(make_report("msteep/sigma2_s" + std::to_string(i + 1) + "_ap",
                              ap_sigma2[i], means[1 + m + i], sizes, true));
  }
  for (int i = 0; i + 1 < m; ++i) {
    const Complex eps = stats.c(i) * stats.c(i + 1) * stats.phi(i, i + 1);
    const std::string base =
        "msteep/phat_corr_" + std::to_string(i + 1) + std::to_string(i + 2);
    out.push_back(make_report(base + "_re", eps.real(), means[1 + 2 * m + 2 * i], sizes, true));
    out.push_back(
        make_report(base + "_im", eps.imag(), means[1 + 2 * m + 2 * i + 1], sizes, true));
  }
  return out;
}

double mc_gsteep_alice_mse_scaled_filter(const ChannelSet& channels,
                                         const PowerConfig& powers, double delta,
                                         long n_samples, std::uint64_t seed) {
  const ScaledChannelSet sc = scale_channels(channels, powers);
  const ProbeStats stats = effective_probe_stats(sc.h_ba_p);
  const int n_a = channels.n_a, n_b = channels.n_b;
  Matrix filt_bob = stats.u_ba.adjoint();
  for (int i = 0; i < n_b; ++i) {
    const double s = stats.pi_scaled(i);
    filt_bob.row(i) *= s / (s * s + 1.0);
  }
  Matrix mid = sc.h_ab_pp;
  for (int j = 0; j < n_b; ++j) mid.col(j) *= stats.r_dp_prime(j) + 1.0;
  Matrix cov = mid * sc.h_ab_pp.adjoint();
  cov.diagonal().array() += 1.0;
  const Matrix filt_alice =
      (1.0 + delta) * Eigen::LLT<Matrix>(hermitize(cov)).solve(sc.h_ab_pp).adjoint();

  StreamRng rng(seed, kSaltG + 7777);
  Vector x_a(n_a), wv(std::max(n_a, n_b)), p(n_b), y_b(n_b), phat(n_b);
  Vector y_a(n_a), shat(n_b), msg(n_b);
  double acc = 0.0;
  for (long k = 0; k < n_samples; ++k) {
    draw_cgauss(rng, x_a);
    p.noalias() = stats.v_ba.adjoint() * x_a;
    draw_cgauss_head(rng, wv, n_b);
    y_b.noalias() = sc.h_ba_p * x_a;
    y_b += wv.head(n_b);
    phat.noalias() = filt_bob * y_b;
    draw_cgauss(rng, msg);
    draw_cgauss_head(rng, wv, n_a);
    y_a.noalias() = sc.h_ab_pp * (phat + msg);
    y_a += wv.head(n_a);
    for (int i = 0; i < n_b; ++i) y_a -= (stats.r_phat(i) * p(i)) * sc.h_ab_pp.col(i);
    shat.noalias() = filt_alice * y_a;
    acc += (shat - msg).squaredNorm();
  }
  return acc / static_cast<double>(n_samples);
}

}  // namespace steep
