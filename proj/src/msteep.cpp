#include "steep/msteep.hpp"

#include <cmath>

#include "steep/errors.hpp"
#include "steep/gsteep.hpp"

namespace steep {

namespace {

constexpr double kRouteTol = 1e-9;

// g_i = sqrt(p_ue_i / 2) h_eve_i, the echo-phase channel into Eve per unit
// message symbol.
Vector eve_echo_vector(const MultiAccessNetwork& net, int i) {
  return std::sqrt(net.p_ue[i] / 2.0) * net.h_eve[i];
}

}  // namespace

void MultiAccessNetwork::validate() const {
  const int m = ue_count();
  if (m < 1) throw InvalidArgument("network needs at least one UE");
  if (n_a < 1 || n_e < 1) throw InvalidArgument("antenna counts must be >= 1");
  if (!(p_a > 0.0) || !std::isfinite(p_a)) throw InvalidArgument("p_a must be > 0");
  if (static_cast<int>(h_ap.size()) != m || static_cast<int>(h_eve.size()) != m ||
      static_cast<int>(p_ue.size()) != m) {
    throw InvalidArgument("per-UE vectors must all have length M");
  }
  if (h_ea.rows() != n_e || h_ea.cols() != n_a) throw InvalidArgument("h_ea shape mismatch");
  for (int i = 0; i < m; ++i) {
    if (h_ue[i].size() != n_a || h_ap[i].size() != n_a || h_eve[i].size() != n_e) {
      throw InvalidArgument("UE channel vector length mismatch");
    }
    if (!(p_ue[i] > 0.0) || !std::isfinite(p_ue[i])) {
      throw InvalidArgument("per-UE powers must be > 0");
    }
    if (h_ue[i].norm() == 0.0) {
      throw InvalidArgument("AP->UE channel must be nonzero (the probe defines the scheme)");
    }
  }
}

UeStats ue_stats(const MultiAccessNetwork& net) {
  net.validate();
  const int m = net.ue_count();
  UeStats st;
  st.s_ue.resize(m);
  st.s_ap.resize(m);
  st.s_eve.resize(m);
  st.d.resize(m);
  st.c.resize(m);
  st.phi.resize(m, m);
  for (int i = 0; i < m; ++i) {
    st.s_ue(i) = net.p_a / net.n_a * net.h_ue[i].squaredNorm();
    st.s_ap(i) = net.p_ue[i] * net.h_ap[i].squaredNorm();
    st.s_eve(i) = net.p_ue[i] * net.h_eve[i].squaredNorm();
    st.d(i) = 1.0 / (st.s_ue(i) + 1.0);
    st.c(i) = 1.0 - st.d(i);
  }
  st.s_ea = net.p_a / net.n_a * net.h_ea.squaredNorm();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      st.phi(i, j) = (net.h_ue[i].transpose() * net.h_ue[j].conjugate())(0) /
                     (net.h_ue[i].norm() * net.h_ue[j].norm());
    }
  }
  return st;
}

double ue_uplink_rate(double s_ue, double s_ap) {
  if (!(s_ue >= 0.0) || !(s_ap >= 0.0)) {
    throw InvalidArgument("ue_uplink_rate: SNRs must be >= 0");
  }
  const double resid = s_ue / ((s_ue + 1.0) * (s_ue + 1.0));
  return std::log2(1.0 + (s_ap / 2.0) / (resid * s_ap / 2.0 + 1.0));
}

Matrix eve_covariance(const MultiAccessNetwork& net, const UeStats& stats,
                      int known_prefix) {
  const int m = net.ue_count();
  const int ne = net.n_e;
  if (known_prefix < 0 || known_prefix > m) {
    throw InvalidArgument("eve_covariance: known_prefix outside [0, M]");
  }
  const Matrix h_ea_p = std::sqrt(net.p_a / net.n_a) * net.h_ea;
  Matrix r = Matrix::Zero((m + 1) * ne, (m + 1) * ne);
  for (int i = 0; i < m; ++i) {
    const Vector gi = eve_echo_vector(net, i);
    for (int j = i; j < m; ++j) {
      Matrix blk;
      if (i == j) {
        // Echo carries phat_i + s_i; conditioning on s_i strips its unit power.
        const double load = (i < known_prefix) ? stats.c(i) : 1.0 + stats.c(i);
        blk = load * (gi * gi.adjoint());
        blk.diagonal().array() += 1.0;
      } else {
        const Vector gj = eve_echo_vector(net, j);
        blk = (stats.c(i) * stats.c(j) * stats.phi(i, j)) * (gi * gj.adjoint());
      }
      r.block(i * ne, j * ne, ne, ne) = blk;
      if (i != j) r.block(j * ne, i * ne, ne, ne) = blk.adjoint();
    }
    // E{y_Ei y_EA^H} = g_i r_{x,i}^H H_EA'^H with r_{x,i} = c_i hbar_i^*.
    const Vector rxi = stats.c(i) * net.h_ue[i].conjugate() / net.h_ue[i].norm();
    const Matrix cross = gi * (h_ea_p * rxi).adjoint();
    r.block(i * ne, m * ne, ne, ne) = cross;
    r.block(m * ne, i * ne, ne, ne) = cross.adjoint();
  }
  Matrix probe = h_ea_p * h_ea_p.adjoint();
  probe.diagonal().array() += 1.0;
  r.block(m * ne, m * ne, ne, ne) = probe;
  return r;
}

Vector eve_cross_vector(const MultiAccessNetwork& net, int ue_index) {
  const int m = net.ue_count();
  if (ue_index < 0 || ue_index >= m) throw InvalidArgument("eve_cross_vector: bad index");
  Vector r = Vector::Zero((m + 1) * net.n_e);
  r.segment(ue_index * net.n_e, net.n_e) = eve_echo_vector(net, ue_index);
  return r;
}

EveJointMse eve_joint_mse_ue1(const MultiAccessNetwork& net, const UeStats& stats) {
  const int m = net.ue_count();
  const int ne = net.n_e;
  const Matrix r = eve_covariance(net, stats);
  Eigen::LDLT<Matrix> ldlt(r);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularChannel("eve_joint_mse_ue1: observation covariance is not PD");
  }
  const Vector r1 = eve_cross_vector(net, 0);
  EveJointMse out;
  out.sigma2 = 1.0 - (r1.adjoint() * ldlt.solve(r1))(0).real();

  // gamma_1 - 1 is Eve's residual uncertainty about phat_1 from everything
  // except UE_1's own echo: c1 = E{y_{E|1} phat_1^*}.
  Vector c1 = Vector::Zero(m * ne);
  for (int j = 1; j < m; ++j) {
    c1.segment((j - 1) * ne, ne) =
        (stats.c(j) * stats.c(0) * stats.phi(j, 0)) * eve_echo_vector(net, j);
  }
  const Matrix h_ea_p = std::sqrt(net.p_a / net.n_a) * net.h_ea;
  const Vector rx1 = stats.c(0) * net.h_ue[0].conjugate() / net.h_ue[0].norm();
  c1.segment((m - 1) * ne, ne) = h_ea_p * rx1;
  const Matrix rbar = r.block(ne, ne, m * ne, m * ne);
  Eigen::LDLT<Matrix> ldlt_bar(rbar);
  if (ldlt_bar.info() != Eigen::Success || !ldlt_bar.isPositive()) {
    throw SingularChannel("eve_joint_mse_ue1: reduced covariance is not PD");
  }
  out.gamma1 = 1.0 + stats.c(0) - (c1.adjoint() * ldlt_bar.solve(c1))(0).real();
  if (!(out.gamma1 > 1.0)) {
    throw InternalCheckFailure("eve_joint_mse_ue1: gamma_1 - 1 must be positive");
  }
  out.c_e1 = clamp_rate(-std::log2(out.sigma2));
  return out;
}

UeSecrecy msteep_secrecy_rate_ue1(const MultiAccessNetwork& net) {
  const UeStats stats = ue_stats(net);
  UeSecrecy out;
  out.r_a1 = ue_uplink_rate(stats.s_ue(0), stats.s_ap(0));
  out.c_e1 = eve_joint_mse_ue1(net, stats).c_e1;
  out.pre_clamp = out.r_a1 - out.c_e1;
  out.r_s1 = std::max(out.pre_clamp, 0.0);
  return out;
}

CrossEchoLeakage cross_echo_leakage(const MultiAccessNetwork& net, const UeStats& stats) {
  if (net.n_a != 1) {
    throw UnsupportedConfig("cross_echo_leakage is defined for n_a = 1");
  }
  const int m = net.ue_count();
  const int ne = net.n_e;
  const double sp = stats.s_ea + 1.0;
  CrossEchoLeakage out;
  if (m == 1) return out;

  // Direct route: t = v^H B^-1 v over the UE 2..M echo space. The diagonal
  // coefficient carries the full echo load 1 + c_i d_i + c_i^2/(S_EA+1);
  // off-diagonal blocks couple through the shared probe only.
  Matrix b = Matrix::Identity((m - 1) * ne, (m - 1) * ne);
  Vector v((m - 1) * ne);
  for (int i = 1; i < m; ++i) {
    const Vector gi = eve_echo_vector(net, i);
    v.segment((i - 1) * ne, ne) = stats.c(i) * gi;
    for (int j = 1; j < m; ++j) {
      const Vector gj = eve_echo_vector(net, j);
      const double coef = (i == j)
          ? 1.0 + stats.c(i) * stats.d(i) + stats.c(i) * stats.c(i) / sp
          : stats.c(i) * stats.c(j) / sp;
      b.block((i - 1) * ne, (j - 1) * ne, ne, ne) += coef * (gi * gj.adjoint());
    }
  }
  out.direct = (v.adjoint() * Eigen::LDLT<Matrix>(b).solve(v))(0).real();

  // Scalar recursion peeling one UE at a time (exact: every coupling block
  // is rank one in the g vectors).
  double t = 0.0;
  for (int i = 1; i < m; ++i) {
    const double ci = stats.c(i);
    const double sig = eve_echo_vector(net, i).squaredNorm();  // S_Ei / 2
    const double eta =
        ci * ci * sig /
        ((1.0 + ci * stats.d(i) + ci * ci / sp - t * ci * ci / (sp * sp)) * sig + 1.0);
    t = t + t * t * eta / (sp * sp) - 2.0 * t * eta / sp + eta;
  }
  out.recursion = t;

  if (std::abs(out.direct - out.recursion) > kRouteTol * std::max(1.0, std::abs(out.direct))) {
    throw InternalCheckFailure("cross_echo_leakage: recursion and direct quadratic form disagree");
  }
  out.value = out.direct;
  if (!(out.value >= 0.0) || out.value >= std::min(static_cast<double>(m - 1), sp)) {
    throw InternalCheckFailure("cross_echo_leakage: value escaped its [0, min(M-1, S_EA+1)) bound");
  }
  return out;
}

double positivity_threshold_ue1(const MultiAccessNetwork& net) {
  if (net.n_a != 1) {
    throw UnsupportedConfig("positivity_threshold_ue1 is defined for n_a = 1");
  }
  const UeStats stats = ue_stats(net);
  const double t = cross_echo_leakage(net, stats).value;
  const double s1 = stats.s_ue(0);
  const double sp = stats.s_ea + 1.0;
  const double shrink = 1.0 - t / sp;
  const double gamma1_closed =
      1.0 + s1 / ((s1 + 1.0) * (s1 + 1.0)) * (1.0 + s1 / sp * shrink);
  const double gamma1 = eve_joint_mse_ue1(net, stats).gamma1;
  if (std::abs(gamma1 - gamma1_closed) > kRouteTol * std::max(1.0, gamma1)) {
    throw InternalCheckFailure("positivity_threshold_ue1: closed-form gamma_1 mismatch");
  }
  const double beta1 = stats.s_eve(0) / stats.s_ap(0);
  if (beta1 <= 1.0) return 0.0;
  return 2.0 * (1.0 - 1.0 / beta1) * (s1 + 1.0) * (s1 + 1.0) * sp / (s1 * s1 * shrink);
}

TotalSecrecy total_secrecy_terms(const MultiAccessNetwork& net) {
  const UeStats stats = ue_stats(net);
  const int m = net.ue_count();
  TotalSecrecy out;
  out.terms.resize(m);
  for (int i = 0; i < m; ++i) {
    TotalSecrecyTerm& term = out.terms[i];
    term.uplink_lower = ue_uplink_rate(stats.s_ue(i), stats.s_ap(i));
    const Matrix ri = eve_covariance(net, stats, i);
    Eigen::LDLT<Matrix> ldlt(ri);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularChannel("total_secrecy_terms: conditioned covariance is not PD");
    }
    const Vector cross = eve_cross_vector(net, i);
    const double sigma2 = 1.0 - (cross.adjoint() * ldlt.solve(cross))(0).real();
    term.eve_chain = clamp_rate(-std::log2(sigma2));
    term.term = term.uplink_lower - term.eve_chain;
    out.total += term.term;
  }
  return out;
}

SymmetricAnalysis symmetric_analysis(double sigma2, double sigma2_a, double sigma2_e,
                                     double sigma2_ea, int ue_count) {
  if (!(sigma2 > 0.0) || !(sigma2_a > 0.0) || !(sigma2_e > 0.0) || !(sigma2_ea > 0.0)) {
    throw InvalidArgument("symmetric_analysis: noise variances must be > 0");
  }
  if (ue_count < 1) throw InvalidArgument("symmetric_analysis: need at least one UE");
  const int m = ue_count;
  const double mu = sigma2 / (1.0 + sigma2);
  const double mup = 1.0 - mu;
  const double mu_ea = sigma2_ea / (1.0 + sigma2_ea);
  const double mu_eap = 1.0 - mu_ea;

  SymmetricAnalysis out;
  out.g_a = mu * mup + sigma2_a;
  out.sigma2_ap = out.g_a / (1.0 + out.g_a);

  // Direct route: real symmetric covariance of Eve's scalar observations,
  // first i-1 UE diagonal entries conditioned on their messages.
  Eigen::MatrixXd base = Eigen::MatrixXd::Constant(m, m, mup * mup);
  base.diagonal().setConstant(1.0 + mup + sigma2_e);
  base -= (mu_eap * mup * mup) * Eigen::MatrixXd::Ones(m, m);  // probe side info
  out.sigma2_eve.resize(m);
  out.r_terms.resize(m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd cond = base;
    for (int l = 0; l < i; ++l) cond(l, l) -= 1.0;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(i) = 1.0;
    out.sigma2_eve[i] = 1.0 - Eigen::LDLT<Eigen::MatrixXd>(cond).solve(e)(i);
    out.r_terms[i] = std::log2(out.sigma2_eve[i] / out.sigma2_ap);
  }

  // Closed form for the fully conditioned last term.
  out.g_e = sigma2_e + mup - mu_eap * mup * mup -
            (m - 1) * mu_ea * mu_ea * std::pow(mup, 4) /
                (mu * mup + sigma2_e + (m - 1) * mu_ea * mup * mup);
  out.g_e_direct = 1.0 / (1.0 / out.sigma2_eve[m - 1] - 1.0);
  out.last_term_positive = out.r_terms[m - 1] > 0.0;
  return out;
}

double symmetric_threshold(double beta0, double sigma2, double sigma2_ea, int ue_count) {
  if (!(beta0 > 1.0)) {
    throw NotApplicable(
        "symmetric_threshold: for beta0 <= 1 the last term is positive at any power");
  }
  if (!(sigma2 > 0.0) || !(sigma2_ea > 0.0) || ue_count < 1) {
    throw InvalidArgument("symmetric_threshold: bad parameters");
  }
  const double mu = sigma2 / (1.0 + sigma2);
  const double mup = 1.0 - mu;
  const double mu_ea = sigma2_ea / (1.0 + sigma2_ea);
  const double c2 = (beta0 - 1.0) / (beta0 * beta0 * mup * mup);
  const double c1 =
      (beta0 - 1.0) * (mu + (ue_count - 1) * mu_ea * mup) / (beta0 * mup) - mu_ea / beta0;
  const double c0 = mu_ea * mu * mup;
  // Positive root of c2 x^2 + c1 x - c0 in the form stable as c2 -> 0.
  return 2.0 * c0 / (c1 + std::sqrt(c1 * c1 + 4.0 * c0 * c2));
}

MultiAccessNetwork symmetric_network(double sigma2, double sigma2_a, double sigma2_e,
                                     double sigma2_ea, int ue_count) {
  if (!(sigma2 > 0.0) || !(sigma2_a > 0.0) || !(sigma2_e > 0.0) || !(sigma2_ea > 0.0) ||
      ue_count < 1) {
    throw InvalidArgument("symmetric_network: bad parameters");
  }
  MultiAccessNetwork net;
  net.n_a = 1;
  net.n_e = 1;
  net.p_a = 1.0;
  Vector probe(1), unit(1), eve(1);
  probe(0) = 1.0 / std::sqrt(sigma2);
  unit(0) = 1.0;
  eve(0) = std::sqrt(sigma2_a / sigma2_e);
  net.h_ea.resize(1, 1);
  net.h_ea(0, 0) = 1.0 / std::sqrt(sigma2_ea);
  for (int i = 0; i < ue_count; ++i) {
    net.h_ue.push_back(probe);
    net.h_ap.push_back(unit);
    net.h_eve.push_back(eve);
    net.p_ue.push_back(2.0 / sigma2_a);
  }
  return net;
}

}  // namespace steep
