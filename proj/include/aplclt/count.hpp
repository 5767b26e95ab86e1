#ifndef APLCLT_COUNT_HPP_
#define APLCLT_COUNT_HPP_

#include <cstdint>

#include "aplclt/params.hpp"
#include "aplclt/subset.hpp"

namespace aplclt {

// Progressions are pairs (a, d) with a in Z/nZ and d in {1, ..., floor(n/2)};
// (a, d) is counted iff x_{a+id} = 1 for i = 0..k-1 (indices mod n). Counts
// fit in 64 bits since they never exceed n*floor(n/2).

/// Word-level kernel: for each d, AND k cyclic shifts of the bit vector and
/// popcount. O(n^2 k / 64).
std::uint64_t count_kap_naive(const SubsetSample& s, const APParams& params);

/// Bit-by-bit loop over every (a, d). Reference for the faster kernels.
std::uint64_t count_kap_scalar(const SubsetSample& s, const APParams& params);

/// 3-AP count through an exact cyclic self-convolution (number-theoretic
/// transform): count = (T - |S|) / 2 with T = sum_b 1_S(b) (1_S * 1_S)(2b).
/// Requires k = 3 and odd n; throws UnsupportedParameters otherwise.
std::uint64_t count_3ap_convolution(const SubsetSample& s, const APParams& params);

/// count(S with bit t toggled) - count(S), by visiting only the progressions
/// through t. O(n k^2). Throws IndexError for t >= n.
std::int64_t flip_delta(const SubsetSample& s, std::uint32_t t, const APParams& params);

}  // namespace aplclt

#endif  // APLCLT_COUNT_HPP_
