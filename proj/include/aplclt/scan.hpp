#ifndef APLCLT_SCAN_HPP_
#define APLCLT_SCAN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "aplclt/lattice.hpp"
#include "aplclt/stats.hpp"

namespace aplclt {

/// Phase bins: peak is phase <= peak_edge or >= 1 - peak_edge, trough is
/// [trough_lo, trough_hi].
struct PhaseBins {
  double peak_edge = 0.15;
  double trough_lo = 0.35;
  double trough_hi = 0.65;
};

struct ScanRow {
  std::int64_t x = 0;
  double p_hat = 0.0;
  double gaussian = 0.0;  // phi(x; mu, sigma)
  double scaled_deviation = 0.0;  // sigma |p_hat - phi|
  double phase = 0.0;  // lattice_phase, NaN outside the increasing branch
  double phase_mod_g = 0.0;
};

/// Pooled peak vs trough statistics for one phase convention.
struct PooledPhase {
  std::uint64_t peak_samples = 0;
  std::uint64_t trough_samples = 0;
  std::size_t peak_integers = 0;
  std::size_t trough_integers = 0;
  double peak_gaussian = 0.0;  // sum of phi over peak integers
  double trough_gaussian = 0.0;
  /// (peak mass / peak Gaussian mass) / (trough mass / trough Gaussian mass).
  double ratio = 0.0;
  /// Mean p_hat per peak integer over mean p_hat per trough integer.
  double raw_ratio = 0.0;
  /// Share of peak samples expected under the Gaussian null.
  double null_share = 0.0;
  /// One-sided binomial P[peak >= observed | null_share].
  double p_value = 1.0;
};

struct ScanReport {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  double p = 0.0;
  std::uint64_t samples = 0;
  double mu = 0.0;
  double sigma = 0.0;
  double G = 0.0;
  double x0 = 0.0;
  double halfwidth = 0.0;
  PhaseBins bins;
  std::vector<ScanRow> rows;
  double max_scaled_deviation = 0.0;
  std::int64_t argmax = 0;
  /// Pooled on the lattice phase (the primary verdict).
  PooledPhase pooled;
  /// Pooled on ((x - mu - x0) mod G) / G, kept for comparison.
  PooledPhase pooled_mod_g;
};

/// Scans every integer with |x - mu| <= halfwidth. Throws ParameterError for
/// an empty histogram, an empty window, or halfwidth > 3 sigma.
ScanReport lclt_scan(const Histogram& hist, const LatticeModel& model, double halfwidth,
                     const PhaseBins& bins = {});

std::string scan_report_to_json(const ScanReport& report);

/// |S| / (sqrt(2 pi) sigma_Z): the mass an LCLT-obeying variable would put on
/// a set of |S| integers near its mean.
double lclt_interval_prediction(std::int64_t set_size, double sigma_Z);

}  // namespace aplclt

#endif  // APLCLT_SCAN_HPP_
