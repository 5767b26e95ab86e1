#include "aplclt/selftest.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "aplclt/count.hpp"
#include "aplclt/decomp.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/lattice.hpp"
#include "aplclt/stats.hpp"
#include "aplclt/subset.hpp"
#include "aplclt/theta.hpp"

namespace aplclt {

namespace {

using Check = std::function<std::string()>;  // empty string means pass

std::string counting() {
  for (std::uint32_t n : {7u, 31u, 101u}) {
    const auto prm = APParams::make(n, 3);
    RandomStream rs(1, n);
    for (int i = 0; i < 50; ++i) {
      const auto s = sample_subset(prm, 0.5, rs);
      const auto a = count_kap_naive(s, prm);
      if (a != count_kap_scalar(s, prm) || a != count_3ap_convolution(s, prm)) {
        return "counting kernels disagree at n=" + std::to_string(n);
      }
    }
  }
  return {};
}

std::string reconstruction() {
  for (std::uint32_t k : {3u, 4u}) {
    const auto prm = APParams::make(31, k);
    const auto table = sigma_table(prm, 0.3);
    RandomStream rs(2, k);
    for (int i = 0; i < 10; ++i) {
      const auto s = sample_subset(prm, 0.3, rs);
      const auto comp = decompose(biased_transform(s, 0.3), prm, table);
      double sum = 0.0;
      for (double v : comp.raw) sum += v;
      const double c = static_cast<double>(count_kap_naive(s, prm));
      if (std::abs(sum - c) > 1e-9 * std::max(1.0, c)) return "sum of components != count";
    }
  }
  return {};
}

std::string sigma_one() {
  const auto prm = APParams::make(31, 3);
  const double want = 31.0 * std::pow(3.0 * 15.0, 2);
  const auto got = static_cast<double>(sigma_squared_exact(1, prm));
  return got == want ? std::string{} : "sigma_1^2 != n (k floor(n/2))^2";
}

std::string theta() {
  const ThetaEvaluator ev(1.0 / 9.0);
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    if (std::abs(f_direct(x, ev) - f_fourier(x, ev)) > 1e-12) return "direct vs Fourier";
  }
  const auto r = extremal_ratio(ev);
  if (std::abs(r.ratio - 4.745) > 0.005) return "C(1/9) = " + std::to_string(r.ratio);
  variance_lower_bound(ev);
  return {};
}

std::string lattice() {
  const auto prm = APParams::make(101, 3);
  const auto m = build_lattice_model(prm, 0.5, sigma_table(prm, 0.5));
  const double want = 101.0 / (9.0 * 100.0);
  if (std::abs(m.delta - want) > 1e-12) return "delta = " + std::to_string(m.delta);
  const double pq = m.p * m.q;
  for (std::int64_t t = -1000; t <= 1000; ++t) {
    const double tt = static_cast<double>(t);
    const double bound = m.C2 * (tt * tt + 2.0 * std::abs(tt)) / pq;
    if (std::abs(A_t(m, t) - tt * m.G) > bound + 1e-9 * (1.0 + std::abs(tt * m.G))) {
      return "|A_t - tG| bound fails at t=" + std::to_string(t);
    }
  }
  return {};
}

std::string determinism() {
  ExperimentConfig cfg;
  cfg.n = 31;
  cfg.num_samples = 3 * kSamplesPerBlock + 17;
  cfg.seed = 7;
  const auto serial = run_mc_serial(cfg);
  cfg.shards = 3;
  const auto par = run_mc(cfg);
  if (!(serial.histogram == par.histogram)) return "histogram depends on shard count";
  if (serial.histogram.total() != cfg.num_samples) return "histogram total != num_samples";
  if (!(Histogram::from_csv(serial.histogram.to_csv()) == serial.histogram)) {
    return "CSV round trip";
  }
  return {};
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"counting kernels agree", counting},
      {"degree components reconstruct the count", reconstruction},
      {"sigma_1 closed form", sigma_one},
      {"theta series agree", theta},
      {"lattice constants", lattice},
      {"MC determinism", determinism},
  };
  std::vector<SelfTestResult> out;
  for (const auto& [name, fn] : checks) {
    SelfTestResult r;
    r.name = name;
    try {
      r.detail = fn();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace aplclt
