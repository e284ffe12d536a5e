#ifndef STEEP_CHANNEL_HPP
#define STEEP_CHANNEL_HPP

#include <cstdint>

#include "steep/linalg.hpp"

namespace steep {

// The four constant channel matrices of a three-node network, with noise
// normalized to unit variance at every receive antenna.
struct ChannelSet {
  int n_a = 0;
  int n_b = 0;
  int n_e = 0;
  Matrix h_ba;  // n_b x n_a, Alice -> Bob
  Matrix h_ab;  // n_a x n_b, Bob -> Alice
  Matrix h_ea;  // n_e x n_a, Alice -> Eve
  Matrix h_eb;  // n_e x n_b, Bob -> Eve

  // Throws InvalidArgument on inconsistent dimensions or non-finite entries.
  void validate() const;
};

struct PowerConfig {
  double p_a = 1.0;  // probe power
  double p_b = 1.0;  // echo power bound

  void validate() const;
};

// Power-scaled channels: primed = channel * sqrt(power/antennas),
// double-primed = primed * sqrt(1/2) (echo splits power between the
// probe estimate and the message).
struct ScaledChannelSet {
  Matrix h_ba_p;   // sqrt(p_a/n_a) * h_ba
  Matrix h_ea_p;   // sqrt(p_a/n_a) * h_ea
  Matrix h_ab_p;   // sqrt(p_b/n_b) * h_ab
  Matrix h_eb_p;   // sqrt(p_b/n_b) * h_eb
  Matrix h_ab_pp;  // sqrt(1/2) * h_ab_p
  Matrix h_eb_pp;  // sqrt(1/2) * h_eb_p
};

// I.i.d. CN(0,1) entries (real/imag parts each N(0,1/2)); deterministic
// for a fixed seed.
ChannelSet sample_channels(int n_a, int n_b, int n_e, std::uint64_t seed);

ScaledChannelSet scale_channels(const ChannelSet& channels, const PowerConfig& powers);

// One-shot wiretap rate for a fixed input covariance k_x (Hermitian PSD,
// trace <= n_a): (log2|I + (p_a/n_a) H_ba K H_ba^H| - log2|I + (p_a/n_a) H_ea K H_ea^H|)^+.
double classic_wtc_rate(const ChannelSet& channels, const PowerConfig& powers,
                        const Matrix& k_x);

// Minimum generalized eigenvalue of (H_ea^H H_ea, H_ba^H H_ba): the worst-case
// Eve-to-Bob receive strength ratio over transmit directions. alpha < 1 is the
// classic one-way feasibility condition. Throws NotApplicable when
// H_ba^H H_ba is singular (the condition has no meaning there).
double channel_strength_ratio_alpha(const Matrix& h_ea, const Matrix& h_ba);

}  // namespace steep

#endif
