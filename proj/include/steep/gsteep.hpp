#ifndef STEEP_GSTEEP_HPP
#define STEEP_GSTEEP_HPP

#include <vector>

#include "steep/channel.hpp"
#include "steep/linalg.hpp"

namespace steep {

// Probe-phase statistics from the SVD of the scaled forward channel.
// The effective probe is p = v_ba^H x_a; Bob's MMSE estimate of it has
// diagonal error covariance r_dp with entries 1/(pi'^2 + 1).
struct ProbeStats {
  Matrix u_ba;            // n_b x n_b left singular vectors
  Matrix v_ba;            // n_a x n_b right singular vectors, column-orthonormal
  RealVector pi_scaled;   // n_b singular values of the scaled channel
  RealVector r_phat;      // diag E{phat phat^H} = pi'^2/(pi'^2+1)
  RealVector r_dp;        // diag MSE of phat = 1/(pi'^2+1)
  RealVector r_dp_prime;  // r_phat .* r_dp, MSE of phat - r_phat*p

  int n_b() const { return static_cast<int>(pi_scaled.size()); }
};

// A capacity together with the two determinants whose ratio produced it.
struct CapacityTerms {
  double capacity = 0.0;  // bits, = num_log2 - den_log2 clamped at 0
  double num = 1.0;       // |G(X+I) + I| >= 1
  double den = 1.0;       // |G X + I| >= 1
};

struct EveCapacityTerms {
  CapacityTerms terms;
  Matrix r_dphat_e;  // Hermitian PSD residual covariance of Eve's probe-estimate estimate
};

// Echo-phase secrecy rate and the log-det terms behind it.
struct SecrecyBreakdown {
  double c_user = 0.0;  // bits from Bob to Alice over the effective channel
  double c_eve = 0.0;   // bits from Bob to Eve
  double r_s = 0.0;     // (c_user - c_eve)^+
  double num_user = 1.0, den_user = 1.0;
  double num_eve = 1.0, den_eve = 1.0;
};

// SISO lumped parameters: phase-1/phase-2 user SNRs and Eve-to-user
// strength ratios per phase.
struct SisoSnr {
  double a = 0.0;      // p_a |h_ba|^2
  double b = 0.0;      // p_b |h_ab|^2
  double alpha = 0.0;  // S_ea / a
  double beta = 0.0;   // S_eb / b

  void validate() const;
};

// Requires n_a >= n_b (probing must go from the larger array; callers that
// want the other direction should swap roles) and full row rank.
ProbeStats effective_probe_stats(const Matrix& h_ba_scaled);

// C = log2|G(R+I)+I| - log2|G R+I| with G = h_ab_pp^H h_ab_pp and R the
// diagonal residual r_dp_prime. The overload taking a vector lets limit
// cases (R = 0) be fed explicitly.
CapacityTerms alice_capacity(const Matrix& h_ab_pp, const ProbeStats& stats);
CapacityTerms alice_capacity(const Matrix& h_ab_pp, const RealVector& r_dp_prime);

// Same shape with R = r_dphat_e, Eve's residual uncertainty about Bob's
// probe estimate after hearing phase 1.
EveCapacityTerms eve_capacity(const Matrix& h_eb_pp, const Matrix& h_ea_p,
                              const ProbeStats& stats);

SecrecyBreakdown gsteep_secrecy_rate(const ChannelSet& channels, const PowerConfig& powers);

// n_b = 1 scalar path; must agree with gsteep_secrecy_rate to 1e-9.
SecrecyBreakdown single_stream_breakdown(const ChannelSet& channels, const PowerConfig& powers);

// Probing-phase secret-key capacity:
// log2|I + H_ba'^H H_ba' (H_ea'^H H_ea' + I)^-1|, bits per probing symbol.
double secret_key_capacity(const Matrix& h_ba_p, const Matrix& h_ea_p);

SecrecyBreakdown siso_secrecy_rate(const SisoSnr& snr);

// Echo-SNR threshold above which the SISO rate is positive:
// 2(beta-1)(a+1)^2(alpha a+1)/(beta a^2); 0 for beta <= 1, +inf for a = 0
// with beta > 1.
double siso_threshold_b(double a, double alpha, double beta);

// log2(1 + a/(alpha a + 1)).
double siso_key_capacity(double a, double alpha);

struct DofSlopes {
  double rs_slope = 0.0;
  double ckey_slope = 0.0;
  int dof_reference = 0;  // min(n_b, (n_a - n_e)^+)
  std::vector<double> rs_values;
  std::vector<double> ckey_values;
};

// Least-squares slope of the rate in log2(p_a) over the top half of an
// increasing grid (>= 4 points, max >= 1e6), p_b = eta_p * p_a.
DofSlopes dof_slope(const ChannelSet& channels, double eta_p,
                    const std::vector<double>& pa_grid);

struct HighPowerGap {
  double r_s = 0.0;
  double c_key = 0.0;
  double limit = 0.0;  // log2|I + Pi^2 V^H (H_ea^H H_ea)^-1 V|
  double rs_gap = 0.0;
  double ckey_gap = 0.0;
};

// Distance from the joint large-power limit (p_a large, p_b/p_a large);
// needs n_e >= n_a >= n_b and nonsingular H_ea^H H_ea.
HighPowerGap highpower_gap(const ChannelSet& channels, double p_a, double pb_over_pa);

}  // namespace steep

#endif
