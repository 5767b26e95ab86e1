#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <json.hpp>

#include "aplclt/decomp.hpp"
#include "aplclt/errors.hpp"
#include "aplclt/lattice.hpp"
#include "aplclt/scan.hpp"
#include "aplclt/stats.hpp"
#include "aplclt/theta.hpp"

using namespace aplclt;

namespace {

LatticeModel flagship_model() {
  const auto prm = APParams::make(101, 3);
  return build_lattice_model(prm, 0.5, sigma_table(prm, 0.5));
}

// Null case: rounded draws from N(mu, sigma^2).
Histogram gaussian_histogram(const LatticeModel& m, std::uint64_t count) {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> nd(m.mu, m.sigma_total);
  Histogram h;
  for (std::uint64_t i = 0; i < count; ++i) h.add(std::llround(nd(rng)));
  return h;
}

}  // namespace

TEST_CASE("null histogram shows no lattice structure") {
  const auto m = flagship_model();
  const std::uint64_t count = 1000000;
  const auto h = gaussian_histogram(m, count);
  const auto r = lclt_scan(h, m, 2.0 * m.sigma_total);
  const double phi_max = 1.0 / (m.sigma_total * std::sqrt(2.0 * std::numbers::pi));
  const double mc_se = m.sigma_total * std::sqrt(phi_max / static_cast<double>(count));
  CHECK(r.max_scaled_deviation <= 3.0 * mc_se);
  CHECK(r.pooled.ratio == doctest::Approx(1.0).epsilon(0.03));
  CHECK(r.pooled.p_value > 1e-4);
  CHECK(r.pooled_mod_g.ratio == doctest::Approx(1.0).epsilon(0.03));
  CHECK(r.rows.size() == static_cast<std::size_t>(std::floor(m.mu + 2 * m.sigma_total) -
                                                  std::ceil(m.mu - 2 * m.sigma_total) + 1));
}

TEST_CASE("scan of the Monte Carlo histogram sees the lattice") {
  const auto m = flagship_model();
  ExperimentConfig cfg;
  cfg.num_samples = 200000;
  cfg.seed = 11;
  const auto h = run_mc(cfg).histogram;
  const auto r = lclt_scan(h, m, 2.0 * m.sigma_total);
  CHECK(r.max_scaled_deviation >= 0.05);
  CHECK(r.pooled.ratio >= 2.0);
  CHECK(r.pooled.p_value < 1e-6);
  CHECK(r.pooled.null_share > 0.3);
  CHECK(r.pooled.null_share < 0.7);

  // Widening the window by one period keeps the pooled statistics.
  const auto wider = lclt_scan(h, m, 1.5 * m.sigma_total + m.G);
  const auto base = lclt_scan(h, m, 1.5 * m.sigma_total);
  CHECK(wider.pooled.ratio == doctest::Approx(base.pooled.ratio).epsilon(0.25));

  const auto j = nlohmann::json::parse(scan_report_to_json(r));
  CHECK(j["pooled"]["ratio"].get<double>() == r.pooled.ratio);
  CHECK(j["phase_bins"]["peak_edge"].get<double>() == 0.15);
  CHECK(j["rows"].size() == r.rows.size());
}

TEST_CASE("scan errors") {
  const auto m = flagship_model();
  Histogram empty;
  CHECK_THROWS_AS(lclt_scan(empty, m, 10.0), ParameterError);
  Histogram h;
  h.add(631);
  CHECK_THROWS_AS(lclt_scan(h, m, 3.1 * m.sigma_total), ParameterError);
  CHECK_THROWS_AS(lclt_scan(h, m, 0.1), ParameterError);
}

TEST_CASE("LCLT interval prediction") {
  CHECK(lclt_interval_prediction(0, 5.0) == 0.0);
  const double sigma = 190.0;
  const auto size = static_cast<std::int64_t>(std::lround(std::sqrt(2.0 * std::numbers::pi) * sigma));
  CHECK(lclt_interval_prediction(size, sigma) == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(lclt_interval_prediction(-1, 1.0), ParameterError);
  CHECK_THROWS_AS(lclt_interval_prediction(1, 0.0), ParameterError);

  // The lattice prediction depends on alpha through f_delta; the LCLT one does not.
  const auto m = flagship_model();
  const ThetaEvaluator ev(1.0 / 9.0);
  IntervalFamily at0;
  at0.s = 3;
  at0.B = m.G / 8.0;
  IntervalFamily at_half = at0;
  at_half.alpha = 0.5;
  const double ratio =
      predicted_L_probability(m, at0, ev).value / predicted_L_probability(m, at_half, ev).value;
  CHECK(ratio == doctest::Approx(4.745).epsilon(0.002));
  auto members = [&](const IntervalFamily& fam) {
    std::int64_t c = 0;
    for (std::int64_t x = 0; x <= 101 * 50; ++x) {
      if (in_L_alpha(m, fam, static_cast<double>(x) - m.mu - m.x0)) ++c;
    }
    return c;
  };
  const double lclt_ratio = lclt_interval_prediction(members(at0), m.sigma_total) /
                            lclt_interval_prediction(members(at_half), m.sigma_total);
  CHECK(lclt_ratio == doctest::Approx(1.0).epsilon(0.1));
}
