#ifndef STEEP_MC_ORACLE_HPP
#define STEEP_MC_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "steep/channel.hpp"
#include "steep/gsteep.hpp"
#include "steep/msteep.hpp"

namespace steep {

// One analytic-vs-empirical comparison. The estimate is batch-means (100
// batches), the standard error the spread of the batch means, so mildly
// nonlinear estimators (log-det capacities, error rates) get honest bars.
struct McReport {
  std::string quantity;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  double z_score = 0.0;
  bool pass = false;   // |z| <= 3
  bool gated = true;   // false: reported for information, not a formula check
};

// Simulates the full two-phase protocol with the closed-form MMSE filters
// applied to the simulated data, so a failing report isolates a formula
// error rather than estimator noise. Validates the probe and message MSE
// diagonals and both effective capacities. n_samples >= 1e4.
std::vector<McReport> mc_gsteep(const ChannelSet& channels, const PowerConfig& powers,
                                long n_samples, std::uint64_t seed);

// PSK round trip. Alice's error rate is gated against the Q formula (the
// formula is exact there); Eve's is gated on the noise-linearized statistic
// and reported ungated for the full conjugate product, whose deviation
// measures the dropped second-order noise terms. Includes rotation-invariance
// moment checks of phase-keyed circular Gaussians. n_symbols >= 1e5.
std::vector<McReport> mc_psteep(int constellation_size, const SisoSnr& snr,
                                long n_symbols, std::uint64_t seed);

// Multiple-access protocol: per-UE AP-side message MSEs, Eve's joint MSE for
// UE_1, the conditioned chain MSEs, and probe-estimate cross-correlations.
// n_samples >= 1e4.
std::vector<McReport> mc_msteep(const MultiAccessNetwork& net, long n_samples,
                                std::uint64_t seed);

// Empirical message MSE at Alice when her MMSE filter is scaled by
// (1 + delta); the minimum over delta sits at 0 up to sampling noise.
double mc_gsteep_alice_mse_scaled_filter(const ChannelSet& channels,
                                         const PowerConfig& powers, double delta,
                                         long n_samples, std::uint64_t seed);

}  // namespace steep

#endif
