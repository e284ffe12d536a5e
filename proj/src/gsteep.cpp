#include "steep/gsteep.hpp"

#include <cmath>
#include <limits>

#include "steep/errors.hpp"

namespace steep {

namespace {

CapacityTerms capacity_from_logs(double num_log2, double den_log2) {
  CapacityTerms t;
  t.capacity = clamp_rate(num_log2 - den_log2);
  t.num = std::exp2(num_log2);
  t.den = std::exp2(den_log2);
  return t;
}

SecrecyBreakdown combine(const CapacityTerms& user, const CapacityTerms& eve) {
  SecrecyBreakdown b;
  b.c_user = user.capacity;
  b.c_eve = eve.capacity;
  b.r_s = std::max(b.c_user - b.c_eve, 0.0);
  b.num_user = user.num;
  b.den_user = user.den;
  b.num_eve = eve.num;
  b.den_eve = eve.den;
  return b;
}

// Scalar capacity log2(1 + s/(r*s + 1)) with its |G(R+I)+I| / |G R+I|
// determinant pair, G = s, R = r.
CapacityTerms scalar_capacity(double s, double r) {
  CapacityTerms t;
  t.num = s * (r + 1.0) + 1.0;
  t.den = s * r + 1.0;
  t.capacity = clamp_rate(std::log2(t.num) - std::log2(t.den));
  return t;
}

}  // namespace

void SisoSnr::validate() const {
  if (!(a >= 0.0) || !(b >= 0.0) || !(alpha >= 0.0) || !(beta >= 0.0) ||
      !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InvalidArgument("SisoSnr: parameters must be finite and >= 0");
  }
}

ProbeStats effective_probe_stats(const Matrix& h_ba_scaled) {
  const Eigen::Index n_b = h_ba_scaled.rows();
  const Eigen::Index n_a = h_ba_scaled.cols();
  if (n_b < 1 || n_a < 1) throw InvalidArgument("effective_probe_stats: empty channel");
  if (n_a < n_b) {
    throw UnsupportedConfig(
        "effective_probe_stats: n_a < n_b; probing is defined from the larger "
        "array, swap the roles of the two users");
  }
  Eigen::JacobiSVD<Matrix> svd(h_ba_scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(n_b - 1) <= sv(0) * n_a * std::numeric_limits<double>::epsilon()) {
    throw SingularChannel("effective_probe_stats: h_ba is rank deficient");
  }
  ProbeStats st;
  st.u_ba = svd.matrixU();
  st.v_ba = svd.matrixV();
  st.pi_scaled = sv;
  // The thin SVD leaves one phase free per singular vector pair, and Eve's
  // echo-phase capacity genuinely depends on that choice (her phase-1
  // observations cancel the echoed estimate better or worse depending on
  // the basis; the user capacity is invariant). Pin a canonical convention
  // so results do not drift across linear-algebra backends: the
  // largest-magnitude entry of each probe direction is made real-positive.
  for (Eigen::Index j = 0; j < n_b; ++j) {
    Eigen::Index k = 0;
    st.v_ba.col(j).cwiseAbs().maxCoeff(&k);
    const Complex pivot = st.v_ba(k, j);
    if (std::abs(pivot) > 0.0) {
      const Complex rot = std::conj(pivot) / std::abs(pivot);
      st.v_ba.col(j) *= rot;
      st.u_ba.col(j) *= rot;
    }
  }
  st.r_dp.resize(n_b);
  st.r_phat.resize(n_b);
  st.r_dp_prime.resize(n_b);
  for (Eigen::Index i = 0; i < n_b; ++i) {
    st.r_dp(i) = 1.0 / (sv(i) * sv(i) + 1.0);
    st.r_phat(i) = 1.0 - st.r_dp(i);  // so r_phat + r_dp == 1 holds exactly
    st.r_dp_prime(i) = st.r_phat(i) * st.r_dp(i);
  }
  return st;
}

CapacityTerms alice_capacity(const Matrix& h_ab_pp, const ProbeStats& stats) {
  return alice_capacity(h_ab_pp, stats.r_dp_prime);
}

CapacityTerms alice_capacity(const Matrix& h_ab_pp, const RealVector& r_dp_prime) {
  const Eigen::Index n_b = r_dp_prime.size();
  if (h_ab_pp.cols() != n_b) {
    throw InvalidArgument("alice_capacity: h_ab_pp columns must match n_b");
  }
  const Matrix gram = hermitize(h_ab_pp.adjoint() * h_ab_pp);
  const RealVector plus_one = r_dp_prime.array() + 1.0;
  return capacity_from_logs(log2det_gram_x_plus_i(gram, plus_one),
                            log2det_gram_x_plus_i(gram, r_dp_prime));
}

EveCapacityTerms eve_capacity(const Matrix& h_eb_pp, const Matrix& h_ea_p,
                              const ProbeStats& stats) {
  const Eigen::Index n_b = stats.n_b();
  const Eigen::Index n_a = stats.v_ba.rows();
  if (h_eb_pp.cols() != n_b || h_ea_p.cols() != n_a) {
    throw InvalidArgument("eve_capacity: channel dimensions inconsistent with stats");
  }
  // r_dphat_e = R_phat - T with T = R_phat V^H (W+I)^-1 W V R_phat.
  // The difference cancels badly at high power, so use the equivalent
  // subtraction-free form R_dp' + R_phat V^H (W+I)^-1 V R_phat.
  Matrix w_plus_i = hermitize(h_ea_p.adjoint() * h_ea_p);
  w_plus_i.diagonal().array() += 1.0;
  const Matrix solved = Eigen::LLT<Matrix>(w_plus_i).solve(stats.v_ba);
  Matrix k = stats.v_ba.adjoint() * solved;
  for (Eigen::Index i = 0; i < n_b; ++i) k.row(i) *= stats.r_phat(i);
  for (Eigen::Index j = 0; j < n_b; ++j) k.col(j) *= stats.r_phat(j);
  Matrix r_dphat_e = hermitize(k);
  for (Eigen::Index i = 0; i < n_b; ++i) r_dphat_e(i, i) += stats.r_dp_prime(i);

  const Matrix gram = hermitize(h_eb_pp.adjoint() * h_eb_pp);
  Matrix plus_one = r_dphat_e;
  plus_one.diagonal().array() += 1.0;
  EveCapacityTerms out;
  out.terms = capacity_from_logs(log2det_gram_x_plus_i(gram, plus_one),
                                 log2det_gram_x_plus_i(gram, r_dphat_e));
  out.r_dphat_e = std::move(r_dphat_e);
  return out;
}

SecrecyBreakdown gsteep_secrecy_rate(const ChannelSet& channels, const PowerConfig& powers) {
  const ScaledChannelSet s = scale_channels(channels, powers);
  const ProbeStats stats = effective_probe_stats(s.h_ba_p);
  const CapacityTerms user = alice_capacity(s.h_ab_pp, stats);
  const EveCapacityTerms eve = eve_capacity(s.h_eb_pp, s.h_ea_p, stats);
  return combine(user, eve.terms);
}

SecrecyBreakdown single_stream_breakdown(const ChannelSet& channels, const PowerConfig& powers) {
  if (channels.n_b != 1) throw InvalidArgument("single_stream_breakdown requires n_b = 1");
  const ScaledChannelSet s = scale_channels(channels, powers);
  const double s_ba = s.h_ba_p.squaredNorm();
  const double s_ab = s.h_ab_p.squaredNorm();
  const double s_eb = s.h_eb_p.squaredNorm();
  const double sig2 = s_ba / (s_ba + 1.0);  // variance of Bob's probe estimate
  const double d0 = 1.0 - sig2;

  // sigma^2 - t, evaluated without cancellation:
  // sigma^2 (d0 + sigma^2 * v^H (W+I)^-1 v), v the unit probe direction.
  const Vector v = channels.h_ba.adjoint().col(0) / channels.h_ba.norm();
  Matrix w_plus_i = hermitize(s.h_ea_p.adjoint() * s.h_ea_p);
  w_plus_i.diagonal().array() += 1.0;
  const double quad = (v.adjoint() * Eigen::LLT<Matrix>(w_plus_i).solve(v))(0).real();
  const double resid = sig2 * (d0 + sig2 * quad);

  const CapacityTerms user = scalar_capacity(s_ab / 2.0, sig2 * d0);
  const CapacityTerms eve = scalar_capacity(s_eb / 2.0, resid);
  return combine(user, eve);
}

double secret_key_capacity(const Matrix& h_ba_p, const Matrix& h_ea_p) {
  if (h_ba_p.cols() != h_ea_p.cols()) {
    throw InvalidArgument("secret_key_capacity: column counts differ");
  }
  // |I + A(B+I)^-1| = |A + B + I| / |B + I| with A, B the two Grams.
  Matrix denom = hermitize(h_ea_p.adjoint() * h_ea_p);
  denom.diagonal().array() += 1.0;
  const Matrix numer = hermitize(denom + h_ba_p.adjoint() * h_ba_p);
  return clamp_rate(log2det_pd(numer) - log2det_pd(denom));
}

SecrecyBreakdown siso_secrecy_rate(const SisoSnr& snr) {
  snr.validate();
  const double a = snr.a;
  const double a1 = a / ((a + 1.0) * (a + 1.0));
  const double a2 = a1 * (a + snr.alpha * a + 1.0) / (snr.alpha * a + 1.0);
  const CapacityTerms user = scalar_capacity(snr.b / 2.0, a1);
  const CapacityTerms eve = scalar_capacity(snr.beta * snr.b / 2.0, a2);
  return combine(user, eve);
}

double siso_threshold_b(double a, double alpha, double beta) {
  if (!(a >= 0.0) || !(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidArgument("siso_threshold_b: parameters must be >= 0");
  }
  if (beta <= 1.0) return 0.0;
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * (beta - 1.0) * (a + 1.0) * (a + 1.0) * (alpha * a + 1.0) / (beta * a * a);
}

double siso_key_capacity(double a, double alpha) {
  if (!(a >= 0.0) || !(alpha >= 0.0)) {
    throw InvalidArgument("siso_key_capacity: parameters must be >= 0");
  }
  return std::log2(1.0 + a / (alpha * a + 1.0));
}

DofSlopes dof_slope(const ChannelSet& channels, double eta_p,
                    const std::vector<double>& pa_grid) {
  channels.validate();
  if (!(eta_p > 0.0)) throw InvalidArgument("dof_slope: eta_p must be > 0");
  if (pa_grid.size() < 4) throw InvalidArgument("dof_slope: grid needs >= 4 points");
  for (size_t i = 0; i + 1 < pa_grid.size(); ++i) {
    if (!(pa_grid[i] > 0.0) || !(pa_grid[i] < pa_grid[i + 1])) {
      throw InvalidArgument("dof_slope: grid must be positive and strictly increasing");
    }
  }
  if (pa_grid.back() < 1e6) throw InvalidArgument("dof_slope: largest p_a must be >= 1e6");

  DofSlopes out;
  out.dof_reference = std::min(channels.n_b, std::max(channels.n_a - channels.n_e, 0));
  for (double pa : pa_grid) {
    const PowerConfig pw{pa, eta_p * pa};
    out.rs_values.push_back(gsteep_secrecy_rate(channels, pw).r_s);
    const ScaledChannelSet s = scale_channels(channels, pw);
    out.ckey_values.push_back(secret_key_capacity(s.h_ba_p, s.h_ea_p));
  }
  auto fit_slope = [&](const std::vector<double>& y) {
    const size_t lo = pa_grid.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pa_grid.size() - lo);
    for (size_t i = lo; i < pa_grid.size(); ++i) {
      const double x = std::log2(pa_grid[i]);
      sx += x;
      sy += y[i];
      sxx += x * x;
      sxy += x * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  out.rs_slope = fit_slope(out.rs_values);
  out.ckey_slope = fit_slope(out.ckey_values);
  return out;
}

HighPowerGap highpower_gap(const ChannelSet& channels, double p_a, double pb_over_pa) {
  channels.validate();
  if (!(p_a > 0.0) || !(pb_over_pa > 0.0)) {
    throw InvalidArgument("highpower_gap: powers must be > 0");
  }
  if (!(channels.n_e >= channels.n_a && channels.n_a >= channels.n_b)) {
    throw UnsupportedConfig("highpower_gap requires n_e >= n_a >= n_b");
  }
  const Matrix gram_e = hermitize(channels.h_ea.adjoint() * channels.h_ea);
  Eigen::LLT<Matrix> llt(gram_e);
  if (llt.info() != Eigen::Success) {
    throw SingularChannel("highpower_gap: H_ea^H H_ea is singular");
  }
  Eigen::JacobiSVD<Matrix> svd(channels.h_ba, Eigen::ComputeThinV);
  const RealVector pi = svd.singularValues();
  Matrix k = svd.matrixV().adjoint() * llt.solve(svd.matrixV());
  for (Eigen::Index i = 0; i < pi.size(); ++i) k.row(i) *= pi(i);
  for (Eigen::Index j = 0; j < pi.size(); ++j) k.col(j) *= pi(j);
  Matrix lim = hermitize(k);
  lim.diagonal().array() += 1.0;

  HighPowerGap out;
  out.limit = log2det_pd(lim);
  const PowerConfig pw{p_a, pb_over_pa * p_a};
  const ScaledChannelSet s = scale_channels(channels, pw);
  if (channels.h_ba.norm() == 0.0) {
    // Degenerate probing: the echo carries no probe component and both
    // receivers see the zero-residual capacities; the limit is trivially 0.
    const CapacityTerms user = alice_capacity(s.h_ab_pp, RealVector::Zero(channels.n_b));
    const CapacityTerms eve = alice_capacity(s.h_eb_pp, RealVector::Zero(channels.n_b));
    out.r_s = std::max(user.capacity - eve.capacity, 0.0);
  } else {
    out.r_s = gsteep_secrecy_rate(channels, pw).r_s;
  }
  out.c_key = secret_key_capacity(s.h_ba_p, s.h_ea_p);
  out.rs_gap = std::abs(out.r_s - out.limit);
  out.ckey_gap = std::abs(out.c_key - out.limit);
  return out;
}

}  // namespace steep
