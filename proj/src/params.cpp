#include "aplclt/params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aplclt/errors.hpp"

namespace aplclt {

std::uint64_t gcd_with_factorial(std::uint64_t n, std::uint32_t m) {
  // gcd(n, m!) without forming m!: peel each factor off the remaining n.
  std::uint64_t rest = n;
  std::uint64_t g = 1;
  for (std::uint64_t f = 2; f <= m; ++f) {
    std::uint64_t common = std::gcd(rest, f);
    g *= common;
    rest /= common;
  }
  return g;
}

APParams APParams::make(std::uint32_t n, std::uint32_t k) {
  if (k < 3) {
    throw ParameterError("progression length k must be >= 3, got " +
                         std::to_string(k));
  }
  if (n < k) {
    throw ParameterError("modulus n must be >= k (n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ")");
  }
  APParams params;
  params.n = n;
  params.k = k;
  params.gcd_ok = gcd_with_factorial(n, k - 1) == 1;
  return params;
}

void APParams::require_multilinear(std::string_view what) const {
  if (!gcd_ok) {
    throw MultilinearityError(std::string(what) + " requires gcd(n, (k-1)!) = 1; n=" +
                              std::to_string(n) + ", k=" + std::to_string(k));
  }
}

void validate_probability(double p) {
  if (!(p > 0.0 && p < 1.0) || std::isnan(p)) {
    throw ParameterError("probability p must lie in (0, 1), got " + std::to_string(p));
  }
}

std::uint64_t binomial(std::uint32_t n, std::uint32_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t result = 1;
  for (std::uint32_t i = 1; i <= r; ++i) {
    result = result * (n - r + i) / i;
  }
  return result;
}

}  // namespace aplclt
