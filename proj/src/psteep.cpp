#include "steep/psteep.hpp"

#include <cmath>

#include "steep/errors.hpp"

namespace steep {

PskConfig::PskConfig(int constellation_size) : size(constellation_size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw InvalidArgument("PSK constellation size must be a power of two >= 2");
  }
  bits = 0;
  for (int s = size; s > 1; s >>= 1) ++bits;
  n0 = (bits == 1) ? 1 : 2;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

PskErrorParams psk_error_params(int constellation_size, const SisoSnr& snr) {
  const PskConfig cfg(constellation_size);
  snr.validate();
  if (!(snr.a > 0.0) || !(snr.b > 0.0)) {
    throw InvalidArgument("psk_error_params: both link SNRs must be > 0");
  }
  const double s_ba = snr.a;
  const double s_ab = snr.b;
  const double s_ea = snr.alpha * snr.a;
  const double s_eb = snr.beta * snr.b;
  PskErrorParams p;
  p.eps_a = std::sqrt(0.5 / s_ba + 0.5 / s_ab);
  // Zero Eve-side SNRs push the corresponding terms to infinity: Eve's
  // detector degenerates to guessing, p = n0*Q(0).
  p.eps_e = std::sqrt(0.5 / s_ba + 0.5 / s_ea + 0.5 / s_eb);
  const double d = std::sin(M_PI / cfg.size);
  p.p_ea = std::min(1.0, cfg.n0 * q_function(d / p.eps_a));
  p.p_ee = std::min(1.0, cfg.n0 * q_function(std::isinf(p.eps_e) ? 0.0 : d / p.eps_e));
  p.low_snr_warning = p.p_ea > 0.3 || p.p_ee > 0.3;
  return p;
}

double psk_capacity(int constellation_size, double p_e) {
  const PskConfig cfg(constellation_size);
  if (!(p_e >= 0.0) || !(p_e <= 1.0)) {
    throw InvalidArgument("psk_capacity: p_e outside [0,1]");
  }
  if (cfg.size == 2) return 1.0 - binary_entropy(p_e);
  const double c = cfg.bits - p_e - binary_entropy(p_e);
  return std::min(std::max(c, 0.0), static_cast<double>(cfg.bits));
}

PsteepRate psteep_secrecy_rate(int constellation_size, const SisoSnr& snr) {
  const PskErrorParams p = psk_error_params(constellation_size, snr);
  PsteepRate r;
  r.c_user = psk_capacity(constellation_size, p.p_ea);
  r.c_eve = psk_capacity(constellation_size, p.p_ee);
  // c_user - c_eve algebraically; the direct difference of the capacities
  // rounds tiny rates away against the leading m.
  const double neighbor_term = (constellation_size == 2) ? 0.0 : p.p_ee - p.p_ea;
  r.r_s = std::max(
      neighbor_term + binary_entropy(p.p_ee) - binary_entropy(p.p_ea), 0.0);
  r.r_s_h2 = binary_entropy(p.p_ee) - binary_entropy(p.p_ea);
  r.approx_warning = p.low_snr_warning;
  return r;
}

bool psteep_power_condition(const SisoSnr& snr) {
  snr.validate();
  if (!(snr.a > 0.0) || !(snr.b > 0.0)) {
    throw InvalidArgument("psteep_power_condition: both link SNRs must be > 0");
  }
  if (snr.beta <= 1.0) return true;
  return snr.b / snr.a > snr.alpha * (1.0 - 1.0 / snr.beta);
}

ErrorRatioBound error_ratio_bound(int constellation_size, const SisoSnr& snr) {
  const PskConfig cfg(constellation_size);
  if (!psteep_power_condition(snr)) {
    throw NotApplicable("error_ratio_bound: power condition does not hold");
  }
  const PskErrorParams p = psk_error_params(constellation_size, snr);
  const double a = snr.a, b = snr.b, al = snr.alpha, be = snr.beta;
  const double sin2 = std::pow(std::sin(M_PI / cfg.size), 2);
  ErrorRatioBound out;
  out.delta_p = p.eps_a * p.eps_e / sin2;
  out.exponent = sin2 * a * a * b * (be * b + al * a - al * be * a) /
                 ((a + b) * (al * be * a * b + be * a * b + al * a * a));
  out.bound = (1.0 + out.delta_p) * std::exp(-out.exponent);
  out.exponent_limit_b_inf = sin2 * a / (al + 1.0);
  return out;
}

}  // namespace steep
