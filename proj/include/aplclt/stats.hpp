#ifndef APLCLT_STATS_HPP_
#define APLCLT_STATS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aplclt/decomp.hpp"
#include "aplclt/lattice.hpp"
#include "aplclt/params.hpp"

namespace aplclt {

/// Samples are drawn in fixed blocks; block b always uses RandomStream(seed, b).
/// Shards only decide how many threads work through the blocks, so results do
/// not depend on them.
inline constexpr std::uint64_t kSamplesPerBlock = 4096;

struct ExperimentConfig {
  std::uint32_t n = 101;
  std::uint32_t k = 3;
  double p = 0.5;
  std::uint64_t num_samples = 1'000'000;
  std::uint64_t seed = 20200101;
  int shards = 1;
  bool record_components = false;
  /// Upper limit on num_samples * n^2.
  double work_budget = 1e13;

  APParams params() const { return APParams::make(n, k); }
  /// Throws ParameterError / ResourceGuardError.
  void validate() const;
};

class Histogram {
 public:
  void add(std::int64_t value, std::uint64_t count = 1);
  void merge(const Histogram& other);

  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::int64_t value) const;
  double probability(std::int64_t value) const;
  const std::map<std::int64_t, std::uint64_t>& counts() const { return counts_; }
  bool empty() const { return total_ == 0; }

  double mean() const;
  /// Unbiased sample variance.
  double variance() const;

  /// "value,count" header, one row per occupied value in increasing order.
  std::string to_csv() const;
  /// Accepts the to_csv() format; lines starting with '#' are skipped.
  static Histogram from_csv(const std::string& text);

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::map<std::int64_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Row-major sample matrix.
struct SampleMatrix {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
};

/// Normalized degree components (1, 3, ..., k) per sample plus the tail
/// Y / sigma_Y. Degree 2 is never stored.
struct ComponentSamples {
  std::uint32_t k = 0;
  std::vector<std::uint32_t> degrees;
  SampleMatrix coords;
  std::vector<double> tail;

  std::size_t size() const { return coords.size(); }
};

struct MCSummary {
  std::uint64_t samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double stddev = 0.0;
  std::int64_t min = 0;
  std::int64_t max = 0;
  double wall_seconds = 0.0;
  int threads = 1;
};

struct MCResult {
  Histogram histogram;
  std::optional<ComponentSamples> components;
  MCSummary summary;
};

/// OpenMP engine: blocks are spread over cfg.shards threads.
MCResult run_mc(const ExperimentConfig& cfg);
/// Single-threaded reference with the same block layout.
MCResult run_mc_serial(const ExperimentConfig& cfg);

/// Components of one subset: normalized degrees 1, 3..k and Y / sigma_Y.
/// For k = 3 the tail is taken as count - mu - Q(l), which is exact for
/// indicator inputs; larger k uses degree_sums().
void subset_components(const SubsetSample& s, std::uint64_t count, const APParams& params,
                       double p, const SigmaTable& sigma, std::span<double> coords,
                       double& tail);

double normal_cdf(double z);
double normal_pdf(double x, double mean, double sd);

/// sup |F_n - Phi| for samples already standardized. Ties are handled by
/// comparing Phi against the empirical CDF on both sides of each jump.
/// Throws ParameterError for fewer than 1000 samples.
double kolmogorov_distance(std::vector<double> samples);
/// Same statistic for (count - mu) / sigma read off a histogram.
double kolmogorov_distance(const Histogram& hist, double mu, double sigma);

/// |P_n[v_1 < a, tail < b] - Phi(a) Phi(b)|.
double joint_cdf_check(const ComponentSamples& cs, double a, double b);

/// Smooth bounded test function g(v) = prod_i s(v_i), s(v) = (1 + tanh v) / 2.
/// |s| <= 1, |s'| <= 1/2, |s''| <= 2/(3 sqrt 3), |s'''| <= 1, so every partial
/// derivative of g of order <= 3 is bounded by 1 and M_r(g) <= dim^{r/2}
/// for r = 2, 3.
double bump_test_function(std::span<const double> v);

struct TestFunctionResult {
  double deviation = 0.0;
  double standard_error = 0.0;
  double mean_samples = 0.0;
  double mean_reference = 0.0;
};

/// Standard normal sample matrix.
SampleMatrix gaussian_reference(std::size_t dim, std::size_t count, std::uint64_t seed);

/// |mean g(samples) - mean g(reference)| with the standard error of the difference.
TestFunctionResult testfunction_check(const SampleMatrix& samples, const SampleMatrix& reference);

/// Sample covariance matrix (dim x dim, row-major).
std::vector<double> covariance(const SampleMatrix& m);

/// Fraction of samples whose count x has x - mu - x0 in L_alpha(B, s).
double l_alpha_frequency(const Histogram& hist, const LatticeModel& model,
                         const IntervalFamily& fam);

/// Total variation between predicted_pmf and the empirical pmf, restricted
/// to integers with |x - mu| <= halfwidth.
double predicted_pmf_total_variation(const Histogram& hist, const LatticeModel& model,
                                     double halfwidth);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace aplclt

#endif  // APLCLT_STATS_HPP_
