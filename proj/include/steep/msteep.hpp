#ifndef STEEP_MSTEEP_HPP
#define STEEP_MSTEEP_HPP

#include <vector>

#include "steep/linalg.hpp"

namespace steep {

// Access point with n_a antennas, M single-antenna UEs, Eve with n_e
// antennas. Unit-variance noise everywhere; powers carry the SNRs.
struct MultiAccessNetwork {
  int n_a = 1;
  int n_e = 1;
  double p_a = 1.0;              // AP probe power
  std::vector<Vector> h_ue;      // AP -> UE_i, length n_a each
  std::vector<Vector> h_ap;      // UE_i -> AP, length n_a each
  std::vector<Vector> h_eve;     // UE_i -> Eve, length n_e each
  Matrix h_ea;                   // AP -> Eve, n_e x n_a
  std::vector<double> p_ue;      // per-UE echo power bounds

  int ue_count() const { return static_cast<int>(h_ue.size()); }
  void validate() const;
};

// Per-UE probe statistics. c_i + d_i = 1 by construction.
struct UeStats {
  RealVector s_ue;   // S_i  = (p_a/n_a) ||h_ue_i||^2
  RealVector s_ap;   // S_Ai = p_ue_i ||h_ap_i||^2
  RealVector s_eve;  // S_Ei = p_ue_i ||h_eve_i||^2
  double s_ea = 0.0; // ||sqrt(p_a/n_a) h_ea||_F^2
  RealVector d;      // 1/(S_i+1)
  RealVector c;      // S_i/(S_i+1)
  Matrix phi;        // phi_{ij} = hbar_i^T hbar_j^*, unit diagonal
};

UeStats ue_stats(const MultiAccessNetwork& net);

// Uplink rate of one UE when the AP uses only that UE's echo and the probe:
// log2(1 + (S_Ai/2) / (S_i S_Ai / (2 (S_i+1)^2) + 1)).
double ue_uplink_rate(double s_ue, double s_ap);

// The ((M+1)*n_e)-dim covariance of Eve's stacked observations
// [y_E1; ...; y_EM; y_EA]. With known_prefix = k the first k UEs' message
// symbols are treated as known to Eve (their unit power leaves the echo
// blocks), which is the conditioning used by the chain-rule total rate.
Matrix eve_covariance(const MultiAccessNetwork& net, const UeStats& stats,
                      int known_prefix = 0);

// E{y_E s_i^*}: the echo vector of UE i in its block slot, zero elsewhere.
Vector eve_cross_vector(const MultiAccessNetwork& net, int ue_index);

struct EveJointMse {
  double sigma2 = 1.0;   // MSE of Eve's joint MMSE estimate of s_1
  double gamma1 = 1.0;   // 1 + c_1 - c_1^H Rbar^-1 c_1; gamma1 - 1 > 0
  double c_e1 = 0.0;     // log2(1/sigma2)
};

// Assembles the full (M+1)-block covariance of Eve's observations and the
// Schur complement that removes UE_1's block. "UE_1" is index 0; permute the
// network to select another UE.
EveJointMse eve_joint_mse_ue1(const MultiAccessNetwork& net, const UeStats& stats);

struct UeSecrecy {
  double r_s1 = 0.0;       // (r_a1 - c_e1)^+
  double pre_clamp = 0.0;  // r_a1 - c_e1
  double r_a1 = 0.0;
  double c_e1 = 0.0;
};

UeSecrecy msteep_secrecy_rate_ue1(const MultiAccessNetwork& net);

struct CrossEchoLeakage {
  double value = 0.0;      // shared value of the two routes
  double direct = 0.0;     // v^H B^-1 v
  double recursion = 0.0;  // scalar recursion over UEs 2..M
};

// Quadratic form measuring how much the other UEs' echoes tell Eve about
// UE_1's probe estimate (n_a = 1 setting). Both routes must agree to 1e-9;
// 0 <= t < min(M-1, S_EA+1).
CrossEchoLeakage cross_echo_leakage(const MultiAccessNetwork& net, const UeStats& stats);

// Echo-SNR threshold on S_A1 above which UE_1's secrecy rate is positive
// (n_a = 1). Returns 0 when beta_1 <= 1. Cross-checks the closed-form
// gamma_1 against eve_joint_mse_ue1 to 1e-9.
double positivity_threshold_ue1(const MultiAccessNetwork& net);

struct TotalSecrecyTerm {
  double uplink_lower = 0.0;  // R_{A|i}, lower bound on the AP-side term
  double eve_chain = 0.0;     // I(s_i; y_E | s_1..s_{i-1})
  double term = 0.0;          // uplink_lower - eve_chain (may be negative)
};

struct TotalSecrecy {
  std::vector<TotalSecrecyTerm> terms;
  double total = 0.0;  // sum of terms (chain-rule lower bound)
};

TotalSecrecy total_secrecy_terms(const MultiAccessNetwork& net);

// Symmetric scalar network: every UE sees probe noise sigma2, the AP hears
// each echo with noise sigma2_a, Eve hears echoes with sigma2_e and the
// probe with sigma2_ea.
struct SymmetricAnalysis {
  std::vector<double> r_terms;       // chain terms, strictly descending
  std::vector<double> sigma2_eve;    // Eve MSE of s_i given s_1..s_{i-1}
  double sigma2_ap = 1.0;            // AP-side MSE, same for every UE
  double g_a = 0.0;                  // 1/sigma2_ap = 1 + 1/g_a
  double g_e = 0.0;                  // closed form for the last chain term
  double g_e_direct = 0.0;           // from the assembled matrix (authoritative)
  bool last_term_positive = false;
};

SymmetricAnalysis symmetric_analysis(double sigma2, double sigma2_a, double sigma2_e,
                                     double sigma2_ea, int ue_count);

// Positive root of the threshold quadratic: the last chain term is positive
// iff sigma2_a < the returned value, with sigma2_e = sigma2_a/beta0 tied.
// Requires beta0 > 1 (otherwise the term is positive for every power).
double symmetric_threshold(double beta0, double sigma2, double sigma2_ea, int ue_count);

// Unit-channel network realizing the symmetric scalar model, for feeding the
// general machinery and the Monte Carlo oracle.
MultiAccessNetwork symmetric_network(double sigma2, double sigma2_a, double sigma2_e,
                                     double sigma2_ea, int ue_count);

}  // namespace steep

#endif
