#ifndef APLCLT_DECOMP_HPP_
#define APLCLT_DECOMP_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "aplclt/params.hpp"
#include "aplclt/subset.hpp"

namespace aplclt {

/// y_i = (x_i - p) / sqrt(pq), the p-biased coordinates of a subset.
struct BiasedVector {
  std::vector<double> y;
  double p = 0.5;
  double q = 0.5;
};

BiasedVector biased_transform(const SubsetSample& s, double p);

/// Coefficient p^{k - l/2} q^{l/2} multiplying the degree-l monomial sums.
double degree_weight(std::uint32_t k, std::uint32_t degree, double p);

/// Degree-l homogeneous part of the counter, by direct enumeration of every
/// (a, d) and every l-subset of positions. O(n^2 C(k,l) l). This is the
/// reference path; degree_sums() is the fast one.
double component_direct(const BiasedVector& y, std::uint32_t degree, const APParams& params);

/// For l = 0..k, the unweighted sums E_l = sum_{a,d} e_l(y_a, ..., y_{a+(k-1)d})
/// of elementary symmetric polynomials over each progression. Works for any
/// real inputs (p-biased bits or standard normals). O(n^2 k^2).
std::vector<double> degree_sums(std::span<const double> y, const APParams& params);

struct SigmaTable;

/// Raw components kAP^0..kAP^k and the normalized ones for degrees 1, 3..k.
struct DegreeComponents {
  std::vector<double> raw;         // index = degree, size k+1
  std::vector<double> normalized;  // degrees 1, 3, 4, ..., k (degree 2 omitted)

  /// Degrees matching the entries of `normalized`.
  static std::vector<std::uint32_t> normalized_degrees(std::uint32_t k);
};

DegreeComponents decompose(const BiasedVector& y, const APParams& params,
                           const SigmaTable& sigma);

/// kAP^1 and kAP^2 as functions of l = sum_i y_i alone. Valid for inputs
/// derived from indicators, where sum y_i^2 = n + ((1-2p)/sqrt(pq)) l.
struct LowDegreeValues {
  double first = 0.0;
  double second = 0.0;
};
LowDegreeValues closed_form_low_degrees(double ellsum, const APParams& params, double p);

/// sigma_l^2 = sum_A r(A)^2 where r(A) counts (a, d, S) tuples whose residue
/// set {a + i d : i in S} equals A. Exact integer, independent of p.
std::uint64_t sigma_squared_exact(std::uint32_t degree, const APParams& params);
double sigma_exact(std::uint32_t degree, const APParams& params);

/// All normalization constants for one (n, k, p). sigma_total is the
/// standard deviation of the count (not its variance).
struct SigmaTable {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  double p = 0.5;
  std::vector<std::uint64_t> sigma_squared;  // index = degree, [0] unused
  std::vector<double> sigma;                 // index = degree, [0] unused
  double sigma_total = 0.0;
  double sigma_Y = 0.0;

  double variance_total() const { return sigma_total * sigma_total; }
};

/// Enumerates sigma_l for l = 1..k and applies p. Checks sigma_1 / n^{3/2}
/// and sigma_l / n (l >= 2) against fixed brackets.
SigmaTable sigma_table(const APParams& params, double p);

/// Rebuilds the p-dependent totals from exact squares (used by the cache).
SigmaTable sigma_table_from_squares(const APParams& params, double p,
                                    std::vector<std::uint64_t> squares);

/// JSON text with keys n, k, p, sigma, sigma_squared, sigma_total, sigma_Y.
/// `sigma` and `sigma_squared` are arrays indexed from degree 1.
std::string sigma_table_to_json(const SigmaTable& table);
SigmaTable sigma_table_from_json(const std::string& text);

/// Reads <dir>/sigma_n<N>_k<K>.json when present, otherwise computes and
/// writes it. The cache is keyed by (n, k); p is applied on load.
SigmaTable cached_sigma_table(const APParams& params, double p,
                              const std::optional<std::filesystem::path>& dir);

}  // namespace aplclt

#endif  // APLCLT_DECOMP_HPP_
