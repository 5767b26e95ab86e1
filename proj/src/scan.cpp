#include "aplclt/scan.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "aplclt/errors.hpp"

namespace aplclt {

namespace {

enum class Bin { kPeak, kTrough, kNone };

Bin classify(double phase, const PhaseBins& bins) {
  if (std::isnan(phase)) return Bin::kNone;
  if (phase <= bins.peak_edge || phase >= 1.0 - bins.peak_edge) return Bin::kPeak;
  if (phase >= bins.trough_lo && phase <= bins.trough_hi) return Bin::kTrough;
  return Bin::kNone;
}

void accumulate(PooledPhase& pool, Bin bin, std::uint64_t count, double gaussian) {
  if (bin == Bin::kPeak) {
    pool.peak_samples += count;
    pool.peak_integers += 1;
    pool.peak_gaussian += gaussian;
  } else if (bin == Bin::kTrough) {
    pool.trough_samples += count;
    pool.trough_integers += 1;
    pool.trough_gaussian += gaussian;
  }
}

void finish(PooledPhase& pool) {
  if (pool.peak_integers == 0 || pool.trough_integers == 0) {
    throw ParameterError("scan window does not reach both peak and trough phases");
  }
  const double peak = static_cast<double>(pool.peak_samples);
  const double trough = static_cast<double>(pool.trough_samples);
  pool.ratio = trough > 0.0 ? (peak / pool.peak_gaussian) / (trough / pool.trough_gaussian)
                            : std::numeric_limits<double>::infinity();
  pool.raw_ratio = trough > 0.0 ? (peak / pool.peak_integers) / (trough / pool.trough_integers)
                                : std::numeric_limits<double>::infinity();
  pool.null_share = pool.peak_gaussian / (pool.peak_gaussian + pool.trough_gaussian);
  const std::uint64_t trials = pool.peak_samples + pool.trough_samples;
  if (trials == 0 || pool.peak_samples == 0) {
    pool.p_value = 1.0;
    return;
  }
  boost::math::binomial_distribution<double> null(static_cast<double>(trials), pool.null_share);
  pool.p_value = boost::math::cdf(boost::math::complement(null, peak - 1.0));
}

nlohmann::ordered_json pooled_json(const PooledPhase& pool) {
  nlohmann::ordered_json j;
  j["peak_samples"] = pool.peak_samples;
  j["trough_samples"] = pool.trough_samples;
  j["peak_integers"] = pool.peak_integers;
  j["trough_integers"] = pool.trough_integers;
  j["peak_gaussian"] = pool.peak_gaussian;
  j["trough_gaussian"] = pool.trough_gaussian;
  j["ratio"] = pool.ratio;
  j["raw_ratio"] = pool.raw_ratio;
  j["null_share"] = pool.null_share;
  j["p_value"] = pool.p_value;
  return j;
}

}  // namespace

ScanReport lclt_scan(const Histogram& hist, const LatticeModel& model, double halfwidth,
                     const PhaseBins& bins) {
  if (hist.empty()) throw ParameterError("lclt_scan: empty histogram");
  const double sigma = model.sigma_total;
  if (!(halfwidth >= 0.0)) throw ParameterError("lclt_scan: negative window");
  if (halfwidth > 3.0 * sigma) throw ParameterError("lclt_scan: window exceeds mu +- 3 sigma");

  ScanReport r;
  r.n = model.n;
  r.k = model.k;
  r.p = model.p;
  r.samples = hist.total();
  r.mu = model.mu;
  r.sigma = sigma;
  r.G = model.G;
  r.x0 = model.x0;
  r.halfwidth = halfwidth;
  r.bins = bins;

  const auto lo = static_cast<std::int64_t>(std::ceil(model.mu - halfwidth));
  const auto hi = static_cast<std::int64_t>(std::floor(model.mu + halfwidth));
  if (lo > hi) throw ParameterError("lclt_scan: window contains no integer");

  for (std::int64_t x = lo; x <= hi; ++x) {
    ScanRow row;
    row.x = x;
    row.p_hat = hist.probability(x);
    row.gaussian = normal_pdf(static_cast<double>(x), model.mu, sigma);
    row.scaled_deviation = sigma * std::abs(row.p_hat - row.gaussian);
    row.phase = lattice_phase(model, static_cast<double>(x) - model.mu - model.x0);
    row.phase_mod_g = phase_mod_g(model, static_cast<double>(x));
    if (row.scaled_deviation > r.max_scaled_deviation) {
      r.max_scaled_deviation = row.scaled_deviation;
      r.argmax = x;
    }
    const std::uint64_t c = hist.count(x);
    accumulate(r.pooled, classify(row.phase, bins), c, row.gaussian);
    accumulate(r.pooled_mod_g, classify(row.phase_mod_g, bins), c, row.gaussian);
    r.rows.push_back(row);
  }
  finish(r.pooled);
  finish(r.pooled_mod_g);
  return r;
}

std::string scan_report_to_json(const ScanReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["p"] = r.p;
  j["samples"] = r.samples;
  j["mu"] = r.mu;
  j["sigma"] = r.sigma;
  j["G"] = r.G;
  j["x0"] = r.x0;
  j["halfwidth"] = r.halfwidth;
  j["phase_bins"] = {{"peak_edge", r.bins.peak_edge},
                     {"trough_lo", r.bins.trough_lo},
                     {"trough_hi", r.bins.trough_hi}};
  j["max_scaled_deviation"] = r.max_scaled_deviation;
  j["argmax"] = r.argmax;
  j["pooled"] = pooled_json(r.pooled);
  j["pooled_mod_g"] = pooled_json(r.pooled_mod_g);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["x"] = row.x;
    o["p_hat"] = row.p_hat;
    o["gaussian"] = row.gaussian;
    o["scaled_deviation"] = row.scaled_deviation;
    if (std::isnan(row.phase)) {
      o["phase"] = nullptr;
    } else {
      o["phase"] = row.phase;
    }
    o["phase_mod_g"] = row.phase_mod_g;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j.dump(2);
}

double lclt_interval_prediction(std::int64_t set_size, double sigma_Z) {
  if (set_size < 0) throw ParameterError("set size must be non-negative");
  if (!(sigma_Z > 0.0)) throw ParameterError("sigma_Z must be positive");
  return static_cast<double>(set_size) / (std::sqrt(2.0 * std::numbers::pi) * sigma_Z);
}

}  // namespace aplclt
