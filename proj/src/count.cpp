#include "aplclt/count.hpp"

#include <bit>
#include <string>
#include <vector>

#include "aplclt/errors.hpp"

namespace aplclt {

namespace {

// Copy of the bit vector tiled cyclically to n + 64 bits, so a 64-bit window
// starting at any residue can be read with two word loads.
std::vector<std::uint64_t> tile_bits(const SubsetSample& s) {
  const std::uint32_t n = s.size();
  const std::uint32_t len = n + 64;
  std::vector<std::uint64_t> tiled(len / 64 + 2, 0);
  std::uint32_t src = 0;
  for (std::uint32_t j = 0; j < len; ++j) {
    if (s.test(src)) tiled[j >> 6] |= std::uint64_t{1} << (j & 63);
    if (++src == n) src = 0;
  }
  return tiled;
}

inline std::uint64_t window(const std::vector<std::uint64_t>& tiled, std::uint32_t off) {
  const std::uint32_t idx = off >> 6;
  const std::uint32_t sh = off & 63;
  if (sh == 0) return tiled[idx];
  return (tiled[idx] >> sh) | (tiled[idx + 1] << (64 - sh));
}

}  // namespace

std::uint64_t count_kap_naive(const SubsetSample& s, const APParams& params) {
  const std::uint32_t n = params.n;
  const std::uint32_t k = params.k;
  const std::uint32_t nwords = (n + 63) / 64;
  const std::uint64_t last_mask =
      (n % 64 == 0) ? ~std::uint64_t{0} : (std::uint64_t{1} << (n % 64)) - 1;
  const auto tiled = tile_bits(s);

  std::vector<std::uint32_t> base(k);
  std::uint64_t total = 0;
  for (std::uint32_t d = 1; d <= params.half(); ++d) {
    for (std::uint32_t i = 0; i < k; ++i) {
      base[i] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(i) * d) % n);
    }
    for (std::uint32_t w = 0; w < nwords; ++w) {
      const std::uint32_t start = 64 * w;
      std::uint64_t acc = ~std::uint64_t{0};
      for (std::uint32_t i = 0; i < k && acc; ++i) {
        std::uint32_t off = start + base[i];
        if (off >= n) off -= n;
        acc &= window(tiled, off);
      }
      if (w + 1 == nwords) acc &= last_mask;
      total += static_cast<std::uint64_t>(std::popcount(acc));
    }
  }
  return total;
}

std::uint64_t count_kap_scalar(const SubsetSample& s, const APParams& params) {
  const std::uint32_t n = params.n;
  std::uint64_t total = 0;
  for (std::uint32_t d = 1; d <= params.half(); ++d) {
    for (std::uint32_t a = 0; a < n; ++a) {
      bool all = true;
      std::uint64_t idx = a;
      for (std::uint32_t i = 0; i < params.k; ++i) {
        if (!s.test(static_cast<std::uint32_t>(idx))) {
          all = false;
          break;
        }
        idx = (idx + d) % n;
      }
      if (all) ++total;
    }
  }
  return total;
}

namespace {

// NTT over Z/998244353 (= 119 * 2^23 + 1, primitive root 3). Inputs are 0/1
// and outputs at most n, far below the modulus, so the convolution is exact.
constexpr std::uint64_t kMod = 998244353;
constexpr std::uint64_t kRoot = 3;

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  b %= kMod;
  while (e) {
    if (e & 1) r = r * b % kMod;
    b = b * b % kMod;
    e >>= 1;
  }
  return r;
}

void ntt(std::vector<std::uint64_t>& a, bool invert) {
  const std::size_t len = a.size();
  for (std::size_t i = 1, j = 0; i < len; ++i) {
    std::size_t bit = len >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t width = 2; width <= len; width <<= 1) {
    std::uint64_t w = pow_mod(kRoot, (kMod - 1) / width);
    if (invert) w = pow_mod(w, kMod - 2);
    for (std::size_t i = 0; i < len; i += width) {
      std::uint64_t wn = 1;
      for (std::size_t j = 0; j < width / 2; ++j) {
        const std::uint64_t u = a[i + j];
        const std::uint64_t v = a[i + j + width / 2] * wn % kMod;
        a[i + j] = (u + v) % kMod;
        a[i + j + width / 2] = (u + kMod - v) % kMod;
        wn = wn * w % kMod;
      }
    }
  }
  if (invert) {
    const std::uint64_t inv_len = pow_mod(len, kMod - 2);
    for (auto& x : a) x = x * inv_len % kMod;
  }
}

}  // namespace

std::uint64_t count_3ap_convolution(const SubsetSample& s, const APParams& params) {
  const std::uint32_t n = params.n;
  if (params.k != 3 || n % 2 == 0) {
    throw UnsupportedParameters("convolution kernel needs k = 3 and odd n (n=" +
                                std::to_string(n) + ", k=" + std::to_string(params.k) +
                                ")");
  }
  std::size_t len = 1;
  while (len < 2 * static_cast<std::size_t>(n)) len <<= 1;
  if (len > (std::size_t{1} << 23)) {
    throw UnsupportedParameters("n too large for the 2^23-point transform");
  }

  std::vector<std::uint64_t> f(len, 0);
  for (std::uint32_t i = 0; i < n; ++i) f[i] = s.test(i) ? 1 : 0;
  ntt(f, false);
  for (auto& x : f) x = x * x % kMod;
  ntt(f, true);

  // Fold the linear self-convolution onto Z/nZ.
  std::uint64_t triples = 0;
  for (std::uint32_t b = 0; b < n; ++b) {
    if (!s.test(b)) continue;
    const std::uint32_t c = static_cast<std::uint32_t>((2 * static_cast<std::uint64_t>(b)) % n);
    triples += f[c] + f[c + n];
  }
  // Ordered pairs (u, v) with u + v = 2b: the u = v = b terms plus both
  // orientations of each progression.
  return (triples - s.popcount()) / 2;
}

std::int64_t flip_delta(const SubsetSample& s, std::uint32_t t, const APParams& params) {
  const std::uint32_t n = params.n;
  const std::uint32_t k = params.k;
  if (t >= n) {
    throw IndexError("flip index " + std::to_string(t) + " outside Z/" + std::to_string(n) +
                     "Z");
  }
  const bool old_bit = s.test(t);
  std::int64_t delta = 0;
  std::vector<std::uint32_t> pos(k);
  for (std::uint32_t d = 1; d <= params.half(); ++d) {
    for (std::uint32_t i = 0; i < k; ++i) {
      // a = t - i d (mod n)
      const std::uint64_t shift = (static_cast<std::uint64_t>(i) * d) % n;
      const std::uint32_t a = static_cast<std::uint32_t>((t + n - shift) % n);
      bool first_hit = true;
      for (std::uint32_t j = 0; j < k; ++j) {
        pos[j] = static_cast<std::uint32_t>((a + static_cast<std::uint64_t>(j) * d) % n);
        if (j < i && pos[j] == t) first_hit = false;
      }
      // (a, d) is reached once for every position holding t; count it once.
      if (!first_hit) continue;
      bool before = true;
      bool after = true;
      for (std::uint32_t j = 0; j < k; ++j) {
        const bool bit = s.test(pos[j]);
        before = before && bit;
        after = after && (pos[j] == t ? !old_bit : bit);
      }
      delta += static_cast<std::int64_t>(after) - static_cast<std::int64_t>(before);
    }
  }
  return delta;
}

}  // namespace aplclt
