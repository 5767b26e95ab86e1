#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aplclt/count.hpp"
#include "aplclt/decomp.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/lattice.hpp"
#include "aplclt/stats.hpp"
#include "aplclt/theta.hpp"

using namespace aplclt;

namespace {

LatticeModel model_for(std::uint32_t n, std::uint32_t k, double p) {
  const auto prm = APParams::make(n, k);
  return build_lattice_model(prm, p, sigma_table(prm, p));
}

// Oracle: P[X + Y in window family] integrated exactly, with X over the
// binomial size distribution and Y ~ N(0, sigma_Y^2).
double integrated_window_mass(const LatticeModel& m, double alpha, double B, int s) {
  const auto pmf = binomial_pmf(m.n, m.p);
  double total = 0.0;
  for (std::uint32_t size = 0; size <= m.n; ++size) {
    const auto t = static_cast<std::int64_t>(size) - m.center_size;
    const double x = A_t(m, t);
    double inner = 0.0;
    for (int i = -s; i <= s; ++i) {
      const double c = m.G * (i + alpha);
      inner += normal_cdf((c + B - x) / m.sigma_Y) - normal_cdf((c - B - x) / m.sigma_Y);
    }
    total += pmf[size] * inner;
  }
  return total;
}

}  // namespace

TEST_CASE("A_t closed form equals Q differences") {
  for (double p : {0.3, 0.5}) {
    const auto m = model_for(101, 3, p);
    const double spq = m.sqrt_pq();
    for (std::int64_t t = -101; t <= 101; ++t) {
      const double want = m.Q(m.a0 + t / spq) - m.Q(m.a0);
      CHECK(std::abs(A_t(m, t) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
    CHECK(A_t(m, 0) == 0.0);
  }
}

TEST_CASE("|A_t - tG| <= C2 (t^2 + 2|t|) / pq") {
  for (double p : {0.3, 0.5, 0.7}) {
    const auto m = model_for(101, 3, p);
    const double pq = m.p * m.q;
    for (std::int64_t t = -1000; t <= 1000; ++t) {
      const double tt = static_cast<double>(t);
      const double bound = m.C2 * (tt * tt + 2.0 * std::abs(tt)) / pq;
      REQUIRE(std::abs(A_t(m, t) - tt * m.G) <= bound * (1.0 + 1e-12) + 1e-9);
    }
  }
}

TEST_CASE("low-degree part of a sample sits on x0 + A_t") {
  struct Case {
    std::uint32_t n, k;
    double p;
  };
  for (const auto c : {Case{101, 3, 0.5}, Case{101, 3, 0.3}, Case{31, 4, 0.4}}) {
    const auto prm = APParams::make(c.n, c.k);
    const auto m = build_lattice_model(prm, c.p, sigma_table(prm, c.p));
    RandomStream rs(23, c.n);
    for (int rep = 0; rep < 200; ++rep) {
      const auto s = sample_subset(prm, c.p, rs);
      const auto y = biased_transform(s, c.p);
      const double x = component_direct(y, 1, prm) + component_direct(y, 2, prm) - m.x0;
      const auto t = static_cast<std::int64_t>(s.popcount()) - m.center_size;
      REQUIRE(std::abs(x - A_t(m, t)) <= 1e-9 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("model constants at n = 101, k = 3, p = 1/2") {
  const auto m = model_for(101, 3, 0.5);
  CHECK(m.center_size == 51);
  CHECK(m.a0 == doctest::Approx(1.0));
  CHECK(m.mu == doctest::Approx(631.25));
  CHECK(m.C1 == doctest::Approx(18.75));
  CHECK(m.G == doctest::Approx(37.5));
  CHECK(m.C2 == doctest::Approx(0.1875));
  CHECK(m.eta == static_cast<int>(std::ceil(2.0 * std::pow(std::log(101.0), 1.5))));
  // p n = 50.5 rounds up.
  CHECK(model_for(31, 3, 0.5).center_size == 16);
}

TEST_CASE("delta from the enumerated tail variance") {
  // Finite form at k = 3, p = 1/2: sigma_3^2 = n(n-1)/2 when gcd(n, 6) = 1,
  // sigma_Y^2 = sigma_3^2 / 64 and C1 = 3(n-1)/16, so
  // delta = 2 pq sigma_Y^2 / C1^2 = n / (9 (n-1)).
  for (std::uint32_t n : {31u, 101u, 1001u}) {
    const auto prm = APParams::make(n, 3);
    const auto table = sigma_table(prm, 0.5);
    const double sigma3_sq = static_cast<double>(sigma_squared_exact(3, prm));
    CHECK(sigma3_sq == doctest::Approx(n * (n - 1.0) / 2.0).epsilon(1e-15));
    const double c1 = 3.0 * (n - 1.0) / 16.0;
    const double want = 2.0 * 0.25 * (sigma3_sq / 64.0) / (c1 * c1);
    CHECK(std::abs(delta_param(prm, 0.5, table) - want) <= 1e-12);
    CHECK(std::abs(delta_param(prm, 0.5, table) - n / (9.0 * (n - 1.0))) <= 1e-12);
    CHECK(std::abs(delta_param(prm, 0.5, table) - 1.0 / 9.0) <= 0.2 / n);
  }
  // (n/(n-1))^2 / 9 is the large-n approximation n floor(n/2) ~ n^2/2;
  // it is off by about 1/(9n).
  const auto prm = APParams::make(101, 3);
  const double literal = std::pow(101.0 / 100.0, 2) / 9.0;
  CHECK(std::abs(delta_param(prm, 0.5, sigma_table(prm, 0.5)) - literal) > 1e-4);
}

TEST_CASE("factor 2 in delta reproduces the integrated window profile") {
  const auto m = model_for(2003, 3, 0.5);
  const double B = m.G / 50.0;
  const int s = 3;
  const ThetaEvaluator with_two(m.delta);
  const ThetaEvaluator without_two(m.delta / 2.0);
  double err_two = 0.0;
  double err_one = 0.0;
  const double norm = integrated_window_mass(m, 0.0, B, s);
  for (int i = 0; i <= 10; ++i) {
    const double alpha = i / 10.0;
    const double shape = integrated_window_mass(m, alpha, B, s) / norm;
    err_two = std::max(err_two, std::abs(shape - f_direct(alpha, with_two) / f_direct(0.0, with_two)));
    err_one = std::max(err_one,
                       std::abs(shape - f_direct(alpha, without_two) / f_direct(0.0, without_two)));
  }
  CHECK(err_two < 0.03);
  CHECK(err_one > 0.1);
}

TEST_CASE("window membership") {
  const double G = 10.0;
  CHECK(in_window_union(G, 0.2, 1.0, -1, 1, 2.5));
  CHECK(in_window_union(G, 0.2, 1.0, -1, 1, -7.5));
  CHECK_FALSE(in_window_union(G, 0.2, 1.0, -1, 1, -17.5));
  CHECK_FALSE(in_window_union(G, 0.2, 1.0, -1, 1, 6.0));
  CHECK(in_window_union(G, 0.2, 1.0, -2, 1, -17.5));
  CHECK_FALSE(in_window_union(G, 0.2, 1.0, 1, -1, 2.0));
  IntervalFamily fam;
  fam.B = 4.0;
  CHECK(fam.disjoint(10.0));
  fam.B = 5.0;
  CHECK_FALSE(fam.disjoint(10.0));
}

TEST_CASE("sandwich implications on randomized in-regime trials") {
  const auto m = model_for(101, 3, 0.5);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  IntervalFamily lower;
  lower.s = 3;
  lower.eta = 1;
  lower.B = m.G / 3.0;
  IntervalFamily upper;
  upper.s = 1;
  upper.eta = 1;
  upper.B = m.G / 8.0;

  for (const IntervalFamily& base : {lower, upper}) {
    int lower_checked = 0;
    int upper_checked = 0;
    for (int trial = 0; trial < 100000; ++trial) {
      IntervalFamily fam = base;
      fam.alpha = unit(rng);
      const std::int64_t reach = fam.s + fam.eta + 3;
      const auto t = static_cast<std::int64_t>(rng() % (2 * reach + 1)) - reach;
      const double y = (2.0 * unit(rng) - 1.0) * (fam.eta + 2) * m.G;
      const auto ev = sandwich_check(m, fam, t, y);
      if (ev.lower_applies && ev.rhs_lower) {
        ++lower_checked;
        REQUIRE(ev.lhs);
      }
      if (ev.upper_applies && ev.lhs && ev.y_within_eta) {
        ++upper_checked;
        REQUIRE(ev.rhs_upper);
      }
    }
    CHECK(lower_checked + upper_checked > 1000);
  }
}

TEST_CASE("literal upper inclusion has a boundary counterexample") {
  // alpha near 1, t = 1, X + Y at the right edge of the i = -1 window:
  // |Y| <= eta G, yet Y is far from every window with |i| <= eta under the
  // literal slack C2 (s+eta)(s+eta+1)/pq. The widened form catches it.
  const auto m = model_for(101, 3, 0.5);
  IntervalFamily fam;
  fam.alpha = 0.99;
  fam.s = 1;
  fam.eta = 1;
  fam.B = m.G / 8.0;
  const double pq = m.p * m.q;
  const std::int64_t t = 1;
  const double y = m.G * (-1 + fam.alpha) + fam.B - A_t(m, t);
  CHECK(in_L_alpha(m, fam, A_t(m, t) + y));
  CHECK(std::abs(y) <= fam.eta * m.G);
  const double literal_slack = m.C2 * (fam.s + fam.eta) * (fam.s + fam.eta + 1) / pq;
  CHECK_FALSE(in_window_union(m.G, fam.alpha, fam.B + literal_slack, -fam.eta, fam.eta, y));
  const auto ev = sandwich_check(m, fam, t, y);
  CHECK(ev.upper_applies);
  CHECK(ev.rhs_upper);
}

TEST_CASE("sandwich regime errors") {
  const auto m = model_for(101, 3, 0.5);
  IntervalFamily fam;
  fam.B = m.G / 2.0;
  CHECK_THROWS_AS(sandwich_check(m, fam, 0, 0.0), RegimeError);
  fam.B = 1.0;
  fam.s = 0;
  CHECK_THROWS_AS(sandwich_check(m, fam, 0, 0.0), RegimeError);
  // s <= eta and a wide upper guard: neither bound applies.
  fam.s = 5;
  fam.eta = 5;
  CHECK_THROWS_AS(sandwich_check(m, fam, 0, 0.0), RegimeError);
}

TEST_CASE("predicted pmf") {
  const auto m = model_for(101, 3, 0.5);
  const auto size_pmf = binomial_pmf(101, 0.5);
  double mass = 0.0;
  double mean = 0.0;
  for (std::int64_t x = -2000; x <= 4000; ++x) {
    const double pr = predicted_pmf(m, size_pmf, x);
    mass += pr;
    mean += pr * static_cast<double>(x);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(mean == doctest::Approx(m.mu).epsilon(1e-3));
  // Local maxima near mu + x0 + A_t for small t.
  for (std::int64_t t = -2; t <= 2; ++t) {
    const auto peak = static_cast<std::int64_t>(std::lround(m.mu + m.x0 + A_t(m, t)));
    const auto trough = static_cast<std::int64_t>(
        std::lround(m.mu + m.x0 + 0.5 * (A_t(m, t) + A_t(m, t + 1))));
    CHECK(predicted_pmf(m, size_pmf, peak) > predicted_pmf(m, size_pmf, trough));
  }
  double total = 0.0;
  for (double v : size_pmf) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lattice phase") {
  const auto m = model_for(101, 3, 0.5);
  for (std::int64_t t = -5; t <= 5; ++t) {
    CHECK(lattice_phase(m, A_t(m, t)) == doctest::Approx(0.0).epsilon(1e-12));
    const double mid = 0.5 * (A_t(m, t) + A_t(m, t + 1));
    CHECK(lattice_phase(m, mid) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(std::isnan(lattice_phase(m, -1e6)));
  CHECK(phase_mod_g(m, m.mu + m.x0 + 2.25 * m.G) == doctest::Approx(0.25));
}

TEST_CASE("L_alpha prediction flags extrapolation") {
  const auto m = model_for(101, 3, 0.5);
  const ThetaEvaluator ev(m.delta);
  IntervalFamily fam;
  fam.s = 3;
  fam.B = m.G / 8.0;
  fam.eta = m.eta;
  const auto pr = predicted_L_probability(m, fam, ev);
  CHECK(pr.extrapolated);
  CHECK(pr.value > 0.0);
  fam.alpha = 0.5;
  const auto trough = predicted_L_probability(m, fam, ev);
  CHECK(pr.value / trough.value == doctest::Approx(extremal_ratio(ev).ratio).epsilon(1e-6));
  fam.B = 0.0;
  CHECK_THROWS_AS(predicted_L_probability(m, fam, ev), ParameterError);
}

TEST_CASE("lattice model needs the gcd condition") {
  const auto prm = APParams::make(100, 3);
  SigmaTable t;
  t.n = 100;
  t.k = 3;
  CHECK_THROWS_AS(build_lattice_model(prm, 0.5, t), MultilinearityError);
}
