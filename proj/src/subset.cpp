#include "aplclt/subset.hpp"

#include <bit>
#include <string>

#include "aplclt/errors.hpp"

namespace aplclt {

SubsetSample::SubsetSample(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

SubsetSample SubsetSample::from_indices(std::uint32_t n,
                                        std::span<const std::uint32_t> members) {
  SubsetSample s(n);
  for (std::uint32_t i : members) {
    if (i >= n) {
      throw IndexError("subset member " + std::to_string(i) + " outside Z/" +
                       std::to_string(n) + "Z");
    }
    s.set(i, true);
  }
  return s;
}

SubsetSample SubsetSample::full(std::uint32_t n) {
  SubsetSample s(n);
  for (std::uint32_t i = 0; i < n; ++i) s.set(i, true);
  return s;
}

void SubsetSample::set(std::uint32_t i, bool value) {
  if (test(i) != value) toggle(i);
}

void SubsetSample::toggle(std::uint32_t i) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  std::uint64_t& word = words_[i >> 6];
  popcount_ = (word & mask) ? popcount_ - 1 : popcount_ + 1;
  word ^= mask;
}

std::vector<std::uint8_t> SubsetSample::indicators() const {
  std::vector<std::uint8_t> x(n_);
  for (std::uint32_t i = 0; i < n_; ++i) x[i] = test(i) ? 1 : 0;
  return x;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::derive_seed(std::uint64_t seed, std::uint64_t stream_index) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (stream_index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  splitmix64(state);
  return splitmix64(state);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : engine_(derive_seed(seed, stream_index)) {}

SubsetSample sample_subset(const APParams& params, double p, RandomStream& stream) {
  validate_probability(p);
  SubsetSample s(params.n);
  for (std::uint32_t i = 0; i < params.n; ++i) {
    if (stream.bernoulli(p)) s.toggle(i);
  }
  return s;
}

}  // namespace aplclt
