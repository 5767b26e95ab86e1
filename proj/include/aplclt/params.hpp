#ifndef APLCLT_PARAMS_HPP_
#define APLCLT_PARAMS_HPP_

#include <cstdint>
#include <string_view>

namespace aplclt {

/// Modulus and progression length. Construct through make() so that the
/// gcd flag is always computed, never asserted by the caller.
struct APParams {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  /// true iff gcd(n, (k-1)!) == 1
  bool gcd_ok = false;

  /// Throws ParameterError unless k >= 3 and n >= k.
  static APParams make(std::uint32_t n, std::uint32_t k);

  /// Largest common difference counted: floor(n/2).
  std::uint32_t half() const { return n / 2; }

  /// n * floor(n/2), the number of (a, d) pairs.
  std::uint64_t num_progressions() const {
    return static_cast<std::uint64_t>(n) * half();
  }

  /// Throws MultilinearityError naming `what` when gcd_ok is false.
  void require_multilinear(std::string_view what) const;

  friend bool operator==(const APParams&, const APParams&) = default;
};

std::uint64_t gcd_with_factorial(std::uint64_t n, std::uint32_t m);

/// Throws ParameterError unless 0 < p < 1.
void validate_probability(double p);

/// Binomial coefficient; exact for the small arguments used here.
std::uint64_t binomial(std::uint32_t n, std::uint32_t r);

}  // namespace aplclt

#endif  // APLCLT_PARAMS_HPP_
