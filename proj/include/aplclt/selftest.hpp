#ifndef APLCLT_SELFTEST_HPP_
#define APLCLT_SELFTEST_HPP_

#include <string>
#include <vector>

namespace aplclt {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite over every module (a few seconds).
std::vector<SelfTestResult> run_selftest();

}  // namespace aplclt

#endif  // APLCLT_SELFTEST_HPP_
