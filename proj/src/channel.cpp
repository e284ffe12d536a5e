#include "steep/channel.hpp"

#include <cmath>

#include "steep/errors.hpp"
#include "steep/rng.hpp"

namespace steep {

namespace {

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string("channel matrix ") + name + " has non-finite entries");
  }
}

}  // namespace

void ChannelSet::validate() const {
  if (n_a < 1 || n_b < 1 || n_e < 1) {
    throw InvalidArgument("antenna counts must be >= 1");
  }
  if (h_ba.rows() != n_b || h_ba.cols() != n_a) throw InvalidArgument("h_ba shape mismatch");
  if (h_ab.rows() != n_a || h_ab.cols() != n_b) throw InvalidArgument("h_ab shape mismatch");
  if (h_ea.rows() != n_e || h_ea.cols() != n_a) throw InvalidArgument("h_ea shape mismatch");
  if (h_eb.rows() != n_e || h_eb.cols() != n_b) throw InvalidArgument("h_eb shape mismatch");
  require_finite(h_ba, "h_ba");
  require_finite(h_ab, "h_ab");
  require_finite(h_ea, "h_ea");
  require_finite(h_eb, "h_eb");
}

void PowerConfig::validate() const {
  if (!(p_a > 0.0) || !std::isfinite(p_a) || !(p_b > 0.0) || !std::isfinite(p_b)) {
    throw InvalidArgument("powers must be finite and > 0");
  }
}

ChannelSet sample_channels(int n_a, int n_b, int n_e, std::uint64_t seed) {
  if (n_a < 1 || n_b < 1 || n_e < 1) {
    throw InvalidArgument("sample_channels: antenna counts must be >= 1");
  }
  StreamRng rng(seed, 0);
  auto draw = [&rng](int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = rng.next_cgauss();
    }
    return m;
  };
  ChannelSet cs;
  cs.n_a = n_a;
  cs.n_b = n_b;
  cs.n_e = n_e;
  cs.h_ba = draw(n_b, n_a);
  cs.h_ab = draw(n_a, n_b);
  cs.h_ea = draw(n_e, n_a);
  cs.h_eb = draw(n_e, n_b);
  return cs;
}

ScaledChannelSet scale_channels(const ChannelSet& channels, const PowerConfig& powers) {
  channels.validate();
  powers.validate();
  const double sa = std::sqrt(powers.p_a / channels.n_a);
  const double sb = std::sqrt(powers.p_b / channels.n_b);
  ScaledChannelSet s;
  s.h_ba_p = sa * channels.h_ba;
  s.h_ea_p = sa * channels.h_ea;
  s.h_ab_p = sb * channels.h_ab;
  s.h_eb_p = sb * channels.h_eb;
  s.h_ab_pp = std::sqrt(0.5) * s.h_ab_p;
  s.h_eb_pp = std::sqrt(0.5) * s.h_eb_p;
  return s;
}

double classic_wtc_rate(const ChannelSet& channels, const PowerConfig& powers,
                        const Matrix& k_x) {
  channels.validate();
  powers.validate();
  if (k_x.rows() != channels.n_a || k_x.cols() != channels.n_a) {
    throw InvalidArgument("classic_wtc_rate: k_x must be n_a x n_a");
  }
  if ((k_x - k_x.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, k_x.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("classic_wtc_rate: k_x is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(k_x));
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
    throw InvalidArgument("classic_wtc_rate: k_x is not PSD");
  }
  if (k_x.trace().real() > channels.n_a + 1e-9) {
    throw InvalidArgument("classic_wtc_rate: trace(k_x) exceeds n_a");
  }
  const double gain = powers.p_a / channels.n_a;
  const Matrix k_sqrt = hermitian_sqrt(k_x);
  auto term = [&](const Matrix& h) {
    const Matrix hk = h * k_sqrt;
    Matrix m = hermitize(gain * (hk * hk.adjoint()));
    m.diagonal().array() += 1.0;
    return log2det_pd(m);
  };
  const double bob = term(channels.h_ba);
  const double eve = term(channels.h_ea);
  return std::max(bob - eve, 0.0);
}

double channel_strength_ratio_alpha(const Matrix& h_ea, const Matrix& h_ba) {
  if (h_ea.cols() != h_ba.cols()) {
    throw InvalidArgument("channel_strength_ratio_alpha: column counts differ");
  }
  const Eigen::Index n = h_ba.cols();
  const Matrix gram_b = hermitize(h_ba.adjoint() * h_ba);
  Eigen::LLT<Matrix> llt(gram_b);
  if (llt.info() != Eigen::Success) {
    throw NotApplicable(
        "strength ratio undefined: H_ba^H H_ba is singular, the one-way "
        "weaker-Eve condition does not apply");
  }
  // LLT can succeed on a Gram that is singular to working precision.
  const auto& l = llt.matrixLLT();
  double dmin = l(0, 0).real(), dmax = l(0, 0).real();
  for (Eigen::Index i = 1; i < n; ++i) {
    dmin = std::min(dmin, l(i, i).real());
    dmax = std::max(dmax, l(i, i).real());
  }
  if (!(dmin > 0.0) || dmin * dmin < 1e-13 * dmax * dmax) {
    throw NotApplicable(
        "strength ratio undefined: H_ba^H H_ba is numerically singular");
  }
  // Whiten: alpha = lambda_min of L^-1 (H_ea^H H_ea) L^-H.
  const Matrix gram_e = hermitize(h_ea.adjoint() * h_ea);
  Matrix w = llt.matrixL().solve(gram_e);
  w = llt.matrixL().solve(w.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(w));
  return std::max(es.eigenvalues().minCoeff(), 0.0);
}

}  // namespace steep
