#ifndef APLCLT_SUBSET_HPP_
#define APLCLT_SUBSET_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "aplclt/params.hpp"

namespace aplclt {

/// One subset of Z/nZ stored as a packed bit vector. Bits past n in the last
/// word are always zero.
class SubsetSample {
 public:
  SubsetSample() = default;
  explicit SubsetSample(std::uint32_t n);
  static SubsetSample from_indices(std::uint32_t n, std::span<const std::uint32_t> members);
  static SubsetSample full(std::uint32_t n);

  std::uint32_t size() const { return n_; }
  std::uint32_t popcount() const { return popcount_; }

  bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::uint32_t i, bool value);
  void toggle(std::uint32_t i);

  std::span<const std::uint64_t> words() const { return words_; }

  /// Indicator vector x_i as 0/1 bytes.
  std::vector<std::uint8_t> indicators() const;

  friend bool operator==(const SubsetSample&, const SubsetSample&) = default;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t popcount_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Seeded random stream. Streams are addressed by (seed, stream index) so a
/// piece of work always sees the same numbers no matter which thread runs it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  /// SplitMix64-based mixing of (seed, stream index) into an engine seed.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Each bit independently set with probability p. Throws ParameterError for
/// p outside (0, 1).
SubsetSample sample_subset(const APParams& params, double p, RandomStream& stream);

}  // namespace aplclt

#endif  // APLCLT_SUBSET_HPP_
