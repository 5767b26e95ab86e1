#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aplclt/errors.hpp"
#include "aplclt/theta.hpp"

using namespace aplclt;

namespace {

// Oracle: plain lattice sum with a fixed wide cut.
double wide_sum(double x, double delta) {
  double s = 0.0;
  for (int l = -200; l <= 200; ++l) s += std::exp(-(x - l) * (x - l) / delta);
  return s;
}

}  // namespace

TEST_CASE("direct and Fourier forms agree") {
  for (double delta : {1.0 / 9.0, 1.0, 5.0}) {
    const ThetaEvaluator ev(delta);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = -0.5 + i / 1000.0;
      worst = std::max(worst, std::abs(f_direct(x, ev) - f_fourier(x, ev)));
      CHECK(f_direct(x, ev) == doctest::Approx(wide_sum(x, delta)).epsilon(1e-13));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("profile is even and 1-periodic") {
  const ThetaEvaluator ev(0.3);
  for (double x : {0.05, 0.2, 0.37}) {
    CHECK(f_direct(x, ev) == doctest::Approx(f_direct(-x, ev)).epsilon(1e-14));
    CHECK(f_direct(x, ev) == doctest::Approx(f_direct(x + 3.0, ev)).epsilon(1e-13));
  }
}

TEST_CASE("peak to trough ratio at delta = 1/9") {
  const ThetaEvaluator ev(1.0 / 9.0);
  const auto r = extremal_ratio(ev);
  CHECK(r.ratio == doctest::Approx(4.745).epsilon(0.005 / 4.745));
  CHECK(r.ratio == doctest::Approx(wide_sum(0.0, 1.0 / 9.0) / wide_sum(0.5, 1.0 / 9.0)).epsilon(1e-9));
  CHECK(r.extremes_at_half_lattice);
  CHECK(std::abs(r.x_max) < 1e-6);
  CHECK(std::abs(r.x_min - 0.5) < 1e-6);
  // Wider smearing flattens the profile.
  CHECK(extremal_ratio(ThetaEvaluator(1.0)).ratio < r.ratio);
}

TEST_CASE("Parseval: series against quadrature") {
  for (double delta : {1.0 / 9.0, 0.5, 1.0}) {
    const ThetaEvaluator ev(delta);
    const auto pc = variance_lower_bound(ev);
    CHECK(std::abs(pc.variance_series - pc.variance_quadrature) <= 1e-10);
    CHECK(pc.one_sided_sum > 0.0);
    CHECK(pc.one_sided_sum <= pc.variance_quadrature);
    const double first = std::numbers::pi * delta *
                         std::exp(-2.0 * std::numbers::pi * std::numbers::pi * delta);
    CHECK(pc.one_sided_sum >= first);
  }
}

TEST_CASE("bad delta") {
  CHECK_THROWS_AS(ThetaEvaluator(0.0), ParameterError);
  CHECK_THROWS_AS(ThetaEvaluator(-1.0), ParameterError);
}
