#ifndef STEEP_PSTEEP_HPP
#define STEEP_PSTEEP_HPP

#include "steep/gsteep.hpp"

namespace steep {

// PSK constellation of size M = 2^m; n0 counts nearest neighbors
// (1 for BPSK, 2 otherwise).
struct PskConfig {
  int size = 2;
  int bits = 1;
  int n0 = 1;

  explicit PskConfig(int constellation_size);
};

// Effective per-dimension noise deviations and symbol error rates of the
// round-trip detection at Alice and at Eve's conjugate-product statistic.
struct PskErrorParams {
  double eps_a = 0.0;
  double eps_e = 0.0;
  double p_ea = 0.0;
  double p_ee = 0.0;
  // n0*Q(.) is a nearest-neighbor approximation; it degrades once error
  // rates get large.
  bool low_snr_warning = false;
};

// Gaussian tail probability.
double q_function(double x);

// Binary entropy in bits, with 0*log0 = 0.
double binary_entropy(double p);

PskErrorParams psk_error_params(int constellation_size, const SisoSnr& snr);

// Symbol capacity of the hard-decision channel: 1 - h2(p) for M = 2,
// (m - p - h2(p))^+ clamped to [0, m] for M >= 4.
double psk_capacity(int constellation_size, double p_e);

struct PsteepRate {
  double r_s = 0.0;     // (c_user - c_eve)^+
  double c_user = 0.0;  // bits per round-trip symbol at Alice
  double c_eve = 0.0;   // bits per round-trip symbol at Eve
  double r_s_h2 = 0.0;  // the h2(p_ee) - h2(p_ea) simplification, reported alongside
  bool approx_warning = false;
};

PsteepRate psteep_secrecy_rate(int constellation_size, const SisoSnr& snr);

// True iff b/a > alpha(1 - 1/beta); equivalently eps_a < eps_e, equivalently
// p_ea < p_ee. Always true for beta <= 1.
bool psteep_power_condition(const SisoSnr& snr);

struct ErrorRatioBound {
  double delta_p = 0.0;     // eps_a*eps_e / sin^2(pi/M)
  double exponent = 0.0;    // P in p_ea/p_ee < (1+delta_p)exp(-P)
  double bound = 0.0;       // (1+delta_p)*exp(-P)
  double exponent_limit_b_inf = 0.0;  // sin^2(pi/M)*a/(alpha+1)
};

// Requires the power condition; the bound has no content otherwise.
ErrorRatioBound error_ratio_bound(int constellation_size, const SisoSnr& snr);

}  // namespace steep

#endif
