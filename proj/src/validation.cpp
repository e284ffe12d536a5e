#include "steep/validation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

#include <json.hpp>

#include "steep/channel.hpp"
#include "steep/errors.hpp"
#include "steep/gsteep.hpp"
#include "steep/mc_oracle.hpp"
#include "steep/msteep.hpp"
#include "steep/psteep.hpp"
#include "steep/rng.hpp"

namespace steep::validation {

namespace {

using steep::sweep::ValidationSpec;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CheckResult check(std::string name, bool pass, std::string detail) {
  return CheckResult{std::move(name), pass, std::move(detail)};
}

// Gated Monte Carlo reports all within |z| <= z_max.
CheckResult oracle_check(std::string name, const std::vector<McReport>& reports,
                         double z_max) {
  double worst = 0.0;
  std::string worst_name;
  bool pass = true;
  for (const auto& r : reports) {
    if (!r.gated) continue;
    if (std::abs(r.z_score) > std::abs(worst)) {
      worst = r.z_score;
      worst_name = r.quantity;
    }
    if (!(std::abs(r.z_score) <= z_max)) pass = false;
  }
  return check(std::move(name), pass, "worst z=" + fmt(worst) + " at " + worst_name);
}

ChannelSet random_channels(int n_a, int n_b, int n_e, std::uint64_t seed) {
  return sample_channels(n_a, n_b, n_e, seed);
}

MultiAccessNetwork random_network(int m, int n_a, int n_e, StreamRng& rng) {
  MultiAccessNetwork net;
  net.n_a = n_a;
  net.n_e = n_e;
  net.p_a = 0.5 + 6.0 * rng.next_unit();
  net.h_ea.resize(n_e, n_a);
  for (int r = 0; r < n_e; ++r) {
    for (int c = 0; c < n_a; ++c) net.h_ea(r, c) = rng.next_cgauss();
  }
  for (int i = 0; i < m; ++i) {
    Vector hu(n_a), ha(n_a), he(n_e);
    for (int k = 0; k < n_a; ++k) hu(k) = rng.next_cgauss();
    for (int k = 0; k < n_a; ++k) ha(k) = rng.next_cgauss();
    for (int k = 0; k < n_e; ++k) he(k) = rng.next_cgauss();
    net.h_ue.push_back(hu);
    net.h_ap.push_back(ha);
    net.h_eve.push_back(he);
    net.p_ue.push_back(0.5 + 5.0 * rng.next_unit());
  }
  return net;
}

SisoSnr lumped_siso(const ChannelSet& cs, const PowerConfig& pw) {
  SisoSnr s;
  s.a = pw.p_a * cs.h_ba.squaredNorm();
  s.b = pw.p_b * cs.h_ab.squaredNorm();
  s.alpha = pw.p_a * cs.h_ea.squaredNorm() / s.a;
  s.beta = pw.p_b * cs.h_eb.squaredNorm() / s.b;
  return s;
}

// ---- formula-vs-oracle ------------------------------------------------

void add_oracle_checks(std::vector<std::function<CheckResult()>>& checks,
                       std::vector<std::string>& names, const ValidationSpec& spec) {
  struct Dims {
    int n_a, n_b, n_e;
  };
  static const Dims kGsteepDims[] = {{1, 1, 1}, {2, 1, 1}, {2, 2, 2}, {3, 2, 2},
                                     {2, 1, 3}, {3, 1, 1}, {2, 2, 1}, {3, 2, 3},
                                     {4, 2, 2}, {3, 3, 2}};
  for (int k = 0; k < spec.configs_per_scheme; ++k) {
    names.push_back("formula-vs-oracle/gsteep/cfg" + std::to_string(k));
    checks.push_back([spec, k] {
      const auto d = kGsteepDims[k % 10];
      const ChannelSet cs = random_channels(d.n_a, d.n_b, d.n_e, spec.seed * 1000 + k);
      const PowerConfig pw{1.5 + 0.8 * (k % 7), 3.0 + 2.1 * (k % 9)};
      return oracle_check("formula-vs-oracle/gsteep/cfg" + std::to_string(k),
                          mc_gsteep(cs, pw, spec.mc_samples, spec.seed + k), spec.z_max);
    });
  }
  for (int k = 0; k < spec.configs_per_scheme; ++k) {
    names.push_back("formula-vs-oracle/psteep/cfg" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0x9e5 + k);
      SisoSnr snr;
      const int m = (k % 2 == 0) ? 2 : 4;
      if (m == 2) {
        snr.a = 2.0 + 4.0 * rng.next_unit();
        snr.b = snr.a * (2.0 + 3.0 * rng.next_unit());
      } else {
        snr.a = 4.0 + 12.0 * rng.next_unit();
        snr.b = snr.a * (2.0 + 4.0 * rng.next_unit());
      }
      snr.alpha = 0.3 + 2.2 * rng.next_unit();
      snr.beta = 0.3 + 2.2 * rng.next_unit();
      return oracle_check("formula-vs-oracle/psteep/cfg" + std::to_string(k),
                          mc_psteep(m, snr, spec.psk_symbols, spec.seed + 31 * k),
                          spec.z_max);
    });
  }
  for (int k = 0; k < spec.configs_per_scheme; ++k) {
    names.push_back("formula-vs-oracle/msteep/cfg" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0xa11 + k);
      const int m = 1 + (k % 4);
      const int n_a = 1 + (k % 3);
      const int n_e = 1 + ((k / 2) % 3);
      const MultiAccessNetwork net = random_network(m, n_a, n_e, rng);
      return oracle_check("formula-vs-oracle/msteep/cfg" + std::to_string(k),
                          mc_msteep(net, spec.mc_samples, spec.seed + 79 * k), spec.z_max);
    });
  }
}

// ---- cross-path identities ---------------------------------------------

void add_cross_path_checks(std::vector<std::function<CheckResult()>>& checks,
                           std::vector<std::string>& names, const ValidationSpec& spec) {
  for (int k = 0; k < 50; ++k) {
    names.push_back("cross-path/single-stream/inst" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0xc0 + k);
      const int n_a = 1 + (k % 4);
      const int n_e = 1 + (k % 3);
      const ChannelSet cs = random_channels(n_a, 1, n_e, spec.seed * 131 + k);
      const PowerConfig pw{0.5 + 49.5 * rng.next_unit(), 0.5 + 199.5 * rng.next_unit()};
      const SecrecyBreakdown full = gsteep_secrecy_rate(cs, pw);
      const SecrecyBreakdown scalar = single_stream_breakdown(cs, pw);
      const double err = std::max({std::abs(full.c_user - scalar.c_user),
                                   std::abs(full.c_eve - scalar.c_eve),
                                   std::abs(full.r_s - scalar.r_s)});
      return check("cross-path/single-stream/inst" + std::to_string(k), err <= spec.cross_tol,
                   "max |diff|=" + fmt(err));
    });
  }
  for (int k = 0; k < 50; ++k) {
    names.push_back("cross-path/siso/inst" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0x515 + k);
      const int n_e = 1 + (k % 3);
      const ChannelSet cs = random_channels(1, 1, n_e, spec.seed * 137 + k);
      const PowerConfig pw{0.5 + 20.0 * rng.next_unit(), 0.5 + 80.0 * rng.next_unit()};
      const SecrecyBreakdown full = gsteep_secrecy_rate(cs, pw);
      const SecrecyBreakdown siso = siso_secrecy_rate(lumped_siso(cs, pw));
      const double err = std::max({std::abs(full.c_user - siso.c_user),
                                   std::abs(full.c_eve - siso.c_eve),
                                   std::abs(full.r_s - siso.r_s)});
      return check("cross-path/siso/inst" + std::to_string(k), err <= spec.cross_tol,
                   "max |diff|=" + fmt(err));
    });
  }
}

// ---- properties ---------------------------------------------------------

void add_property_checks(std::vector<std::function<CheckResult()>>& checks,
                            std::vector<std::string>& names, const ValidationSpec& spec) {
  names.push_back("properties/psk_error_exponent_anchor");
  checks.push_back([] {
    const SisoSnr snr{100.0, 1000.0, 2.0, 2.0};
    const auto t0 = std::chrono::steady_clock::now();
    const ErrorRatioBound bound = error_ratio_bound(2, snr);
    const auto t1 = std::chrono::steady_clock::now();
    const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    const bool pass = std::abs(bound.exponent - 26.4) <= 0.05 && us < 1000.0;
    return check("properties/psk_error_exponent_anchor", pass, "P=" + fmt(bound.exponent));
  });

  for (int k = 0; k < 20; ++k) {
    names.push_back("properties/echo_threshold_sign_change/inst" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0x3b + k);
      const double a = 0.2 * std::pow(250.0, rng.next_unit());
      const double alpha = 0.1 + 7.9 * rng.next_unit();
      const double beta = 1.1 + 4.9 * rng.next_unit();
      const double bbar = siso_threshold_b(a, alpha, beta);
      const double below = siso_secrecy_rate({a, bbar * (1.0 - 1e-3), alpha, beta}).r_s;
      const double above = siso_secrecy_rate({a, bbar * (1.0 + 1e-3), alpha, beta}).r_s;
      return check("properties/echo_threshold_sign_change/inst" + std::to_string(k),
                   below == 0.0 && above > 0.0,
                   "bbar=" + fmt(bbar) + " below=" + fmt(below) + " above=" + fmt(above));
    });
  }

  struct DofCase {
    int n_a, n_b, n_e;
    std::uint64_t seed;
  };
  static const DofCase kDof[] = {{4, 2, 1, 11}, {2, 2, 2, 12}, {3, 1, 2, 13}, {3, 2, 3, 14}};
  for (const auto& c : kDof) {
    const std::string name = "properties/dof_slope/" + std::to_string(c.n_a) +
                             std::to_string(c.n_b) + std::to_string(c.n_e);
    names.push_back(name);
    checks.push_back([c, name] {
      const ChannelSet cs = random_channels(c.n_a, c.n_b, c.n_e, c.seed);
      std::vector<double> grid;
      for (double p = 1e4; p <= 1.0001e8; p *= std::sqrt(10.0)) grid.push_back(p);
      const DofSlopes slopes = dof_slope(cs, 1.0, grid);
      const double tol = 0.05 * std::max(1, slopes.dof_reference);
      const bool pass = std::abs(slopes.rs_slope - slopes.dof_reference) <= tol &&
                        std::abs(slopes.ckey_slope - slopes.dof_reference) <= tol;
      return check(name, pass,
                   "dof=" + std::to_string(slopes.dof_reference) +
                       " rs_slope=" + fmt(slopes.rs_slope) +
                       " ckey_slope=" + fmt(slopes.ckey_slope));
    });
  }

  struct GapCase {
    int n_a, n_b, n_e;
    std::uint64_t seed;
  };
  static const GapCase kGap[] = {{1, 1, 1, 21}, {2, 1, 2, 22}, {2, 2, 2, 26}, {3, 2, 3, 24}};
  for (const auto& c : kGap) {
    const std::string name = "properties/highpower_convergence/" + std::to_string(c.n_a) +
                             std::to_string(c.n_b) + std::to_string(c.n_e);
    names.push_back(name);
    checks.push_back([c, name] {
      const ChannelSet cs = random_channels(c.n_a, c.n_b, c.n_e, c.seed);
      const HighPowerGap far = highpower_gap(cs, 1e4, 1e3);
      const HighPowerGap near = highpower_gap(cs, 1e2, 1e1);
      const bool pass = far.rs_gap < 0.05 && far.rs_gap < near.rs_gap;
      return check(name, pass,
                   "gap(1e4,1e3)=" + fmt(far.rs_gap) + " gap(1e2,1e1)=" + fmt(near.rs_gap) +
                       " limit=" + fmt(far.limit));
    });
  }
  names.push_back("properties/highpower_scalar_anchor");
  checks.push_back([] {
    const double rs = siso_secrecy_rate({1e4, 1e7, 1.0, 1.0}).r_s;
    return check("properties/highpower_scalar_anchor", std::abs(rs - 1.0) <= 0.02,
                 "r_s=" + fmt(rs));
  });

  names.push_back("properties/key_dominates_strong_eve");
  checks.push_back([] {
    static const double kAlpha[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    static const double kA[] = {0.5, 2.0, 8.0, 32.0, 128.0};
    static const double kB[] = {1.0, 10.0, 100.0, 1e3, 1e4};
    bool pass = true;
    double min_margin = 1e300;
    for (double alpha : kAlpha) {
      for (double a : kA) {
        const double ckey = siso_key_capacity(a, alpha);
        for (double b : kB) {
          for (double beta : {1.0, 2.0}) {
            const double rs = siso_secrecy_rate({a, b, alpha, beta}).r_s;
            min_margin = std::min(min_margin, ckey - rs);
            if (!(ckey > rs)) pass = false;
          }
        }
      }
    }
    return check("properties/key_dominates_strong_eve", pass, "min margin=" + fmt(min_margin));
  });

  names.push_back("properties/key_reversal_search");
  checks.push_back([] {
    static const double kAlpha[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    static const double kA[] = {0.5, 2.0, 8.0, 32.0, 128.0};
    int found = 0, total = 0;
    for (double alpha : kAlpha) {
      for (double a : kA) {
        ++total;
        const double ckey = siso_key_capacity(a, alpha);
        const double a1 = a / ((a + 1.0) * (a + 1.0));
        const double a2 = a1 * (a + alpha * a + 1.0) / (alpha * a + 1.0);
        const double gap = std::log2((a1 + 1.0) / a2);  // lim_b c_user - ckey
        double b = 4.0;
        bool ok = false;
        for (int it = 0; it < 200 && !ok; ++it, b *= 2.0) {
          const double c_user = std::log2(1.0 + (b / 2.0) / (b * a1 / 2.0 + 1.0));
          if (c_user < ckey + 0.5 * gap) continue;
          const double beta =
              std::min(0.9, 0.9 * (std::exp2(0.5 * gap) - 1.0) / (b / 2.0));
          if (siso_secrecy_rate({a, b, alpha, beta}).r_s > ckey) ok = true;
        }
        if (ok) ++found;
      }
    }
    return check("properties/key_reversal_search", found == total,
                 std::to_string(found) + "/" + std::to_string(total) + " found");
  });

  names.push_back("properties/psk_condition_equivalences");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0xe9);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      SisoSnr snr;
      snr.a = 0.5 * std::pow(600.0, rng.next_unit());
      snr.b = 0.5 * std::pow(2400.0, rng.next_unit());
      snr.alpha = 0.05 + 3.95 * rng.next_unit();
      snr.beta = 0.05 + 3.95 * rng.next_unit();
      const int m = (k % 2 == 0) ? 2 : 4;
      const PskErrorParams pe = psk_error_params(m, snr);
      const bool cond = psteep_power_condition(snr);
      if (cond != (pe.eps_a < pe.eps_e) || cond != (pe.p_ea < pe.p_ee)) ++bad;
    }
    return check("properties/psk_condition_equivalences", bad == 0,
                 std::to_string(bad) + " of 1000 draws violated the equivalence");
  });

  for (int m : {1, 2, 4, 8}) {
    const std::string name = "properties/multiaccess_threshold_sign_change/M" + std::to_string(m);
    names.push_back(name);
    checks.push_back([spec, m, name] {
      StreamRng rng(spec.seed, 0x6a0 + m);
      MultiAccessNetwork net = random_network(m, 1, 1 + (m % 3), rng);
      // force beta_1 > 1 by scaling UE_1's Eve channel
      const UeStats st0 = ue_stats(net);
      const double beta_target = 1.3 + 2.0 * rng.next_unit();
      net.h_eve[0] *= std::sqrt(beta_target * st0.s_ap(0) / st0.s_eve(0));
      const double thr = positivity_threshold_ue1(net);
      const double hap2 = net.h_ap[0].squaredNorm();
      MultiAccessNetwork below = net, above = net;
      below.p_ue[0] = thr * (1.0 - 1e-3) / hap2;
      above.p_ue[0] = thr * (1.0 + 1e-3) / hap2;
      const double rs_below = msteep_secrecy_rate_ue1(below).r_s1;
      const double rs_above = msteep_secrecy_rate_ue1(above).r_s1;
      return check(name, rs_below == 0.0 && rs_above > 0.0,
                   "thr=" + fmt(thr) + " below=" + fmt(rs_below) + " above=" + fmt(rs_above));
    });
  }

  names.push_back("properties/multiaccess_threshold_bisection");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0x6b1);
    MultiAccessNetwork net = random_network(4, 1, 2, rng);
    const UeStats st0 = ue_stats(net);
    net.h_eve[0] *= std::sqrt(2.0 * st0.s_ap(0) / st0.s_eve(0));
    const double thr = positivity_threshold_ue1(net);
    const double hap2 = net.h_ap[0].squaredNorm();
    double lo = thr * 0.5, hi = thr * 2.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      MultiAccessNetwork probe = net;
      probe.p_ue[0] = mid / hap2;
      (msteep_secrecy_rate_ue1(probe).pre_clamp > 0.0 ? hi : lo) = mid;
    }
    const double found = 0.5 * (lo + hi);
    const double rel = std::abs(found - thr) / thr;
    return check("properties/multiaccess_threshold_bisection", rel <= 1e-6,
                 "thr=" + fmt(thr) + " bisected=" + fmt(found) + " rel=" + fmt(rel));
  });

  names.push_back("properties/symmetric_weak_eve_positive");
  checks.push_back([] {
    bool pass = true;
    std::string detail;
    for (double beta0 : {0.5, 1.0}) {
      for (double s2 : {0.3, 1.0}) {
        for (int m : {2, 6}) {
          const double s2a = 0.4;
          const SymmetricAnalysis sym = symmetric_analysis(s2, s2a, s2a / beta0, 0.8, m);
          if (!sym.last_term_positive) pass = false;
          detail += fmt(sym.r_terms.back()) + " ";
        }
      }
    }
    return check("properties/symmetric_weak_eve_positive", pass, "last terms: " + detail);
  });
}

// ---- dual-route checks --------------------------------------------------

void add_dual_route_checks(std::vector<std::function<CheckResult()>>& checks,
                         std::vector<std::string>& names, const ValidationSpec& spec) {
  for (int k = 0; k < 50; ++k) {
    names.push_back("dual-route/leakage_recursion_vs_direct/inst" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0xac0 + k);
      const int m = 1 + (k % 8);
      const int n_e = 1 + (k % 3);
      const MultiAccessNetwork net = random_network(m, 1, n_e, rng);
      const UeStats stats = ue_stats(net);
      const CrossEchoLeakage t = cross_echo_leakage(net, stats);
      const double err = std::abs(t.direct - t.recursion);
      // positivity_threshold_ue1 also cross-checks gamma_1 internally
      positivity_threshold_ue1(net);
      return check("dual-route/leakage_recursion_vs_direct/inst" + std::to_string(k),
                   err <= spec.cross_tol, "t=" + fmt(t.value) + " |route diff|=" + fmt(err));
    });
  }

  names.push_back("dual-route/leakage_bound");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0xacb);
    int bad = 0;
    double max_t = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const int m = 2 + (k % 7);
      const MultiAccessNetwork net = random_network(m, 1, 1 + (k % 3), rng);
      const UeStats stats = ue_stats(net);
      const double t = cross_echo_leakage(net, stats).value;
      max_t = std::max(max_t, t);
      if (!(t >= 0.0 && t < std::min(static_cast<double>(m - 1), stats.s_ea + 1.0))) ++bad;
    }
    return check("dual-route/leakage_bound", bad == 0,
                 std::to_string(bad) + " violations, max t=" + fmt(max_t));
  });

  names.push_back("dual-route/leakage_monotonic_in_probe_snr");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0xacd);
    MultiAccessNetwork net = random_network(5, 1, 2, rng);
    double prev_t = -1.0, prev_ratio = 1e300;
    bool pass = true;
    for (int step = 0; step < 12; ++step) {
      MultiAccessNetwork scaled = net;
      scaled.h_ea *= std::pow(2.0, 0.5 * step);
      const UeStats stats = ue_stats(scaled);
      const double t = cross_echo_leakage(scaled, stats).value;
      const double ratio = t / (stats.s_ea + 1.0);
      if (t < prev_t - 1e-12 || ratio > prev_ratio + 1e-12) pass = false;
      prev_t = t;
      prev_ratio = ratio;
    }
    return check("dual-route/leakage_monotonic_in_probe_snr", pass, "final t=" + fmt(prev_t));
  });

  for (int k = 0; k < 50; ++k) {
    names.push_back("dual-route/symmetric_closed_vs_matrix/inst" + std::to_string(k));
    checks.push_back([spec, k] {
      StreamRng rng(spec.seed, 0xad0 + k);
      const int m = 1 + (k % 10);
      const double s2 = 0.1 + 2.0 * rng.next_unit();
      const double s2a = 0.05 + 1.5 * rng.next_unit();
      const double s2e = 0.05 + 1.5 * rng.next_unit();
      const double s2ea = 0.1 + 2.0 * rng.next_unit();
      const SymmetricAnalysis sym = symmetric_analysis(s2, s2a, s2e, s2ea, m);
      const double err = std::abs(sym.g_e - sym.g_e_direct);
      return check("dual-route/symmetric_closed_vs_matrix/inst" + std::to_string(k),
                   err <= spec.cross_tol * std::max(1.0, std::abs(sym.g_e)),
                   "g_e=" + fmt(sym.g_e) + " |diff|=" + fmt(err));
    });
  }

  names.push_back("dual-route/symmetric_threshold_root");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0xade);
    bool pass = true;
    std::string detail;
    for (int k = 0; k < 5; ++k) {
      const double beta0 = 2.0;
      const double s2 = 0.2 + 1.5 * rng.next_unit();
      const double s2ea = 0.2 + 1.5 * rng.next_unit();
      const int m = 2 + 2 * k;
      const double thr = symmetric_threshold(beta0, s2, s2ea, m);
      auto ge_minus_ga = [&](double s2a) {
        const SymmetricAnalysis sym = symmetric_analysis(s2, s2a, s2a / beta0, s2ea, m);
        return sym.g_e - sym.g_a;
      };
      double lo = thr * 1e-3, hi = thr * 1e3;
      for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (ge_minus_ga(mid) > 0.0 ? lo : hi) = mid;
      }
      const double found = std::sqrt(lo * hi);
      const double rel = std::abs(found - thr) / thr;
      detail += fmt(rel) + " ";
      if (!(rel < 1e-8)) pass = false;
    }
    return check("dual-route/symmetric_threshold_root", pass, "residuals: " + detail);
  });

  names.push_back("dual-route/symmetric_threshold_scaling");
  checks.push_back([] {
    const double beta0 = 2.0, s2 = 0.5, s2ea = 0.8;
    const double t1 = symmetric_threshold(beta0, s2, s2ea, 1000);
    const double t2 = symmetric_threshold(beta0, s2, s2ea, 2000);
    const double scaling = t1 * 1000.0 / (t2 * 2000.0);
    // large-M linear limit c0/c1
    const double mu = s2 / (1.0 + s2), mup = 1.0 - mu;
    const double mu_ea = s2ea / (1.0 + s2ea);
    const double c1 = (beta0 - 1.0) * (mu + 999.0 * mu_ea * mup) / (beta0 * mup) - mu_ea / beta0;
    const double c0 = mu_ea * mu * mup;
    const double lin = c0 / c1;
    const bool pass =
        std::abs(scaling - 1.0) <= 0.1 && std::abs(t1 - lin) <= 0.1 * lin;
    return check("dual-route/symmetric_threshold_scaling", pass,
                 "t(1e3)*1e3/(t(2e3)*2e3)=" + fmt(scaling) + " linear=" + fmt(lin) +
                     " t=" + fmt(t1));
  });

  names.push_back("dual-route/symmetric_vs_general");
  checks.push_back([spec] {
    StreamRng rng(spec.seed, 0xadf);
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double s2 = 0.2 + rng.next_unit();
      const double s2a = 0.1 + rng.next_unit();
      const double s2e = 0.1 + rng.next_unit();
      const double s2ea = 0.2 + rng.next_unit();
      const int m = 1 + k;
      const SymmetricAnalysis sym = symmetric_analysis(s2, s2a, s2e, s2ea, m);
      const MultiAccessNetwork net = symmetric_network(s2, s2a, s2e, s2ea, m);
      const TotalSecrecy tot = total_secrecy_terms(net);
      for (int i = 0; i < m; ++i) {
        const double general = tot.terms[i].uplink_lower - tot.terms[i].eve_chain;
        worst = std::max(worst, std::abs(general - sym.r_terms[i]));
      }
    }
    if (worst > spec.cross_tol) pass = false;
    return check("dual-route/symmetric_vs_general", pass, "max term diff=" + fmt(worst));
  });
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationSpec& spec) {
  std::vector<std::function<CheckResult()>> checks;
  std::vector<std::string> names;
  auto want = [&spec](const char* suite) {
    return spec.suites.empty() ||
           std::find(spec.suites.begin(), spec.suites.end(), suite) != spec.suites.end();
  };
  if (want("formula-vs-oracle")) add_oracle_checks(checks, names, spec);
  if (want("cross-path")) add_cross_path_checks(checks, names, spec);
  if (want("properties")) add_property_checks(checks, names, spec);
  if (want("dual-route")) add_dual_route_checks(checks, names, spec);

  // Apply the name filter before running anything.
  std::vector<std::function<CheckResult()>> selected;
  std::vector<std::string> selected_names;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (spec.filter.empty() || names[i].find(spec.filter) != std::string::npos) {
      selected.push_back(std::move(checks[i]));
      selected_names.push_back(names[i]);
    }
  }

  std::vector<CheckResult> results(selected.size());
  auto run_one = [&](std::size_t i) {
    try {
      results[i] = selected[i]();
    } catch (const std::exception& e) {
      results[i] =
          CheckResult{selected_names[i], false, std::string("exception: ") + e.what()};
    }
  };
  const int workers = std::max(1, spec.jobs);
  if (workers == 1 || selected.size() < 2) {
    for (std::size_t i = 0; i < selected.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < results.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return results;
}

std::string render_report(const std::vector<CheckResult>& results) {
  nlohmann::json j;
  j["checks"] = nlohmann::json::array();
  int passed = 0;
  for (const auto& r : results) {
    j["checks"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    if (r.pass) ++passed;
  }
  j["passed"] = passed;
  j["failed"] = static_cast<int>(results.size()) - passed;
  return j.dump(2) + "\n";
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace steep::validation
