#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "aplclt/count.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/params.hpp"
#include "aplclt/subset.hpp"

using namespace aplclt;

namespace {

// Oracle: (a, d) pairs straight from the definition, membership via std::set.
std::uint64_t brute_count(const std::set<std::uint32_t>& s, std::uint32_t n, std::uint32_t k) {
  std::uint64_t c = 0;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t d = 1; d <= n / 2; ++d) {
      bool all = true;
      for (std::uint32_t i = 0; i < k && all; ++i) all = s.count((a + i * d) % n) > 0;
      c += all;
    }
  }
  return c;
}

std::set<std::uint32_t> members(const SubsetSample& s) {
  std::set<std::uint32_t> out;
  for (std::uint32_t i = 0; i < s.size(); ++i) {
    if (s.test(i)) out.insert(i);
  }
  return out;
}

SubsetSample from_mask(std::uint32_t n, std::uint64_t mask) {
  SubsetSample s(n);
  for (std::uint32_t i = 0; i < n; ++i) s.set(i, (mask >> i) & 1U);
  return s;
}

}  // namespace

TEST_CASE("word kernel matches the definition on every subset of small n") {
  for (std::uint32_t n : {5u, 7u, 8u, 11u, 12u}) {
    for (std::uint32_t k : {3u, 4u, 5u}) {
      if (k > n) continue;
      const auto prm = APParams::make(n, k);
      for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        const auto s = from_mask(n, mask);
        const auto want = brute_count(members(s), n, k);
        REQUIRE(count_kap_naive(s, prm) == want);
        REQUIRE(count_kap_scalar(s, prm) == want);
      }
    }
  }
}

TEST_CASE("word kernel across word boundaries") {
  std::mt19937_64 rng(5);
  for (std::uint32_t n : {63u, 64u, 65u, 127u, 128u, 129u, 200u}) {
    for (std::uint32_t k : {3u, 4u, 6u}) {
      const auto prm = APParams::make(n, k);
      for (int rep = 0; rep < 20; ++rep) {
        SubsetSample s(n);
        std::bernoulli_distribution coin(0.3 + 0.1 * (rep % 5));
        for (std::uint32_t i = 0; i < n; ++i) s.set(i, coin(rng));
        CHECK(count_kap_naive(s, prm) == brute_count(members(s), n, k));
      }
    }
  }
}

TEST_CASE("full set has n floor(n/2) progressions") {
  for (std::uint32_t n : {7u, 10u, 101u}) {
    const auto prm = APParams::make(n, 3);
    CHECK(count_kap_naive(SubsetSample::full(n), prm) == std::uint64_t{n} * (n / 2));
    CHECK(count_kap_naive(SubsetSample(n), prm) == 0);
  }
}

TEST_CASE("convolution count equals the word kernel for odd n") {
  for (std::uint32_t n : {7u, 31u, 101u, 1001u}) {
    const auto prm = APParams::make(n, 3);
    RandomStream rs(17, n);
    for (int rep = 0; rep < 200; ++rep) {
      const auto s = sample_subset(prm, rep % 2 ? 0.5 : 0.2, rs);
      REQUIRE(count_3ap_convolution(s, prm) == count_kap_naive(s, prm));
    }
    CHECK(count_3ap_convolution(SubsetSample::full(n), prm) == std::uint64_t{n} * (n / 2));
  }
}

TEST_CASE("convolution count rejects unsupported inputs") {
  const auto even = APParams::make(10, 3);
  CHECK_THROWS_AS(count_3ap_convolution(SubsetSample(10), even), UnsupportedParameters);
  const auto k4 = APParams::make(11, 4);
  CHECK_THROWS_AS(count_3ap_convolution(SubsetSample(11), k4), UnsupportedParameters);
}

TEST_CASE("flip_delta equals the change in count") {
  std::mt19937_64 rng(9);
  for (std::uint32_t n : {7u, 12u, 31u, 64u}) {
    for (std::uint32_t k : {3u, 4u}) {
      const auto prm = APParams::make(n, k);
      RandomStream rs(3, n * 10 + k);
      for (int rep = 0; rep < 20; ++rep) {
        const auto s = sample_subset(prm, 0.5, rs);
        const auto t = static_cast<std::uint32_t>(rng() % n);
        auto flipped = s;
        flipped.toggle(t);
        const auto want = static_cast<std::int64_t>(count_kap_naive(flipped, prm)) -
                          static_cast<std::int64_t>(count_kap_naive(s, prm));
        CHECK(flip_delta(s, t, prm) == want);
      }
      CHECK_THROWS_AS(flip_delta(SubsetSample(n), n, prm), IndexError);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(APParams::make(10, 2), ParameterError);
  CHECK_THROWS_AS(APParams::make(3, 4), ParameterError);
  CHECK(APParams::make(101, 3).gcd_ok);
  CHECK_FALSE(APParams::make(100, 3).gcd_ok);
  CHECK_FALSE(APParams::make(35, 6).gcd_ok);
  CHECK(APParams::make(37, 6).gcd_ok);
  CHECK_THROWS_AS(validate_probability(0.0), ParameterError);
  CHECK_THROWS_AS(validate_probability(1.0), ParameterError);
  CHECK_THROWS_AS(validate_probability(std::nan("")), ParameterError);
  const std::vector<std::uint32_t> bad = {3, 9};
  CHECK_THROWS_AS(SubsetSample::from_indices(9, bad), IndexError);
}

TEST_CASE("random streams are addressed by seed and index") {
  RandomStream a(1, 2);
  RandomStream b(1, 2);
  RandomStream c(1, 3);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  const auto prm = APParams::make(1000, 3);
  RandomStream r(4, 0);
  double total = 0;
  for (int i = 0; i < 100; ++i) total += sample_subset(prm, 0.3, r).popcount();
  CHECK(total / 100.0 == doctest::Approx(300.0).epsilon(0.02));
}
