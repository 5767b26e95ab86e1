#include "aplclt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "aplclt/errors.hpp"

namespace aplclt {

double LatticeModel::sqrt_pq() const { return std::sqrt(p * q); }

double delta_param(const APParams& params, double p, const SigmaTable& sigma) {
  validate_probability(p);
  const double q = 1.0 - p;
  const double k = params.k;
  const double n = params.n;
  const double c1 = k * (n - 1.0) / 2.0 * std::pow(p, k - 0.5) * std::sqrt(q) -
                    (1.0 - 2.0 * p) * k * (k - 1.0) / 4.0 * std::pow(p, k - 1.5) * std::sqrt(q);
  if (!(sigma.sigma_Y > 0.0)) throw ParameterError("delta needs sigma_Y > 0");
  if (!(c1 > 0.0)) throw ParameterError("delta needs C1 > 0");
  return 2.0 * p * q * sigma.sigma_Y * sigma.sigma_Y / (c1 * c1);
}

LatticeModel build_lattice_model(const APParams& params, double p, const SigmaTable& sigma) {
  params.require_multilinear("build_lattice_model");
  validate_probability(p);
  if (sigma.n != params.n || sigma.k != params.k) {
    throw ParameterError("sigma table was built for a different (n, k)");
  }
  LatticeModel m;
  m.n = params.n;
  m.k = params.k;
  m.p = p;
  m.q = 1.0 - p;
  const double n = params.n;
  const double k = params.k;
  const double q = m.q;
  const double spq = std::sqrt(p * q);

  m.C0 = -n * k * (k - 1.0) / 4.0 * std::pow(p, k - 1.0) * q;
  m.C1 = k * (n - 1.0) / 2.0 * std::pow(p, k - 0.5) * std::sqrt(q) -
         (1.0 - 2.0 * p) * k * (k - 1.0) / 4.0 * std::pow(p, k - 1.5) * std::sqrt(q);
  m.C2 = k * (k - 1.0) / 4.0 * std::pow(p, k - 1.0) * q;
  if (!(m.C1 > 0.0)) throw InternalError("C1 must be positive");

  m.center_size = static_cast<std::int64_t>(std::floor(p * n + 0.5));
  m.a0 = (static_cast<double>(m.center_size) - p * n) / spq;
  if (std::abs(m.a0) * spq > 0.5 + 1e-12) throw InternalError("|a0| sqrt(pq) exceeds 1/2");
  m.x0 = m.Q(m.a0);
  m.G = m.C1 / spq;
  m.mu = std::pow(p, k) * static_cast<double>(params.num_progressions());
  m.sigma_Y = sigma.sigma_Y;
  m.sigma_total = sigma.sigma_total;
  m.delta = delta_param(params, p, sigma);
  m.eta = static_cast<int>(std::ceil(2.0 * std::pow(std::log(n), k / 2.0)));
  return m;
}

double A_t(const LatticeModel& model, std::int64_t t) {
  const double spq = model.sqrt_pq();
  const double tt = static_cast<double>(t);
  return model.C2 * (2.0 * tt * model.a0 / spq + tt * tt / (spq * spq)) + model.C1 * tt / spq;
}

bool in_window_union(double G, double alpha, double B, std::int64_t i_lo, std::int64_t i_hi,
                     double v) {
  if (i_lo > i_hi || B < 0.0) return false;
  // The distance to G(i + alpha) is convex in i, so the clamped nearest index
  // is the best candidate in range.
  double i = std::round(v / G - alpha);
  i = std::clamp(i, static_cast<double>(i_lo), static_cast<double>(i_hi));
  return std::abs(v - G * (i + alpha)) <= B;
}

bool in_L_alpha(const LatticeModel& model, const IntervalFamily& fam, double v) {
  return in_window_union(model.G, fam.alpha, fam.B, -fam.s, fam.s, v);
}

LProbability predicted_L_probability(const LatticeModel& model, const IntervalFamily& fam,
                                     const ThetaEvaluator& f_delta) {
  if (!(fam.B > 0.0)) throw ParameterError("window half-width B must be positive");
  if (fam.s <= 0) throw ParameterError("window count s must be positive");
  const double n = model.n;
  const double s = fam.s;
  LProbability out;
  out.value = 2.0 * s * fam.B * std::numbers::sqrt2 /
              (model.sigma_Y * std::sqrt(std::numbers::pi * n * model.p * model.q)) *
              f_direct(fam.alpha, f_delta);
  const bool b_ok = fam.B < std::pow(n, 1.0 - 1.0 / 36.0);
  const bool s_ok = fam.eta < fam.s && s < std::pow(n, 0.5 - 1.0 / 24.0);
  out.extrapolated = !(b_ok && s_ok);
  return out;
}

SandwichEvents sandwich_check(const LatticeModel& model, const IntervalFamily& fam,
                              std::int64_t t, double yval) {
  if (fam.s <= 0 || fam.eta <= 0 || !(fam.B > 0.0)) {
    throw RegimeError("sandwich bounds need s, eta >= 1 and B > 0");
  }
  if (!fam.disjoint(model.G)) {
    throw RegimeError("B >= G/2: the windows overlap");
  }
  const double pq = model.p * model.q;
  const std::int64_t s = fam.s;
  const std::int64_t eta = fam.eta;
  const double c = model.C2 / pq;
  const double lower_slack = c * static_cast<double>(s * s + s);
  const double upper_guard = c * static_cast<double>((s + eta + 2) * (s + eta + 3));
  const double upper_slack = c * static_cast<double>((s + eta + 1) * (s + eta + 2));

  SandwichEvents ev;
  ev.lower_applies = s > eta && fam.B - lower_slack >= 0.0;
  ev.upper_applies = upper_guard < model.G / 2.0;
  if (!ev.lower_applies && !ev.upper_applies) {
    throw RegimeError("neither sandwich bound applies to this (B, s, eta)");
  }

  const double x = A_t(model, t);
  const std::int64_t abs_t = t < 0 ? -t : t;
  ev.lhs = in_L_alpha(model, fam, x + yval);
  ev.rhs_lower = abs_t <= s - eta &&
                 in_window_union(model.G, fam.alpha, fam.B - lower_slack, -eta, eta, yval);
  ev.rhs_upper = abs_t <= s + eta + 1 &&
                 in_window_union(model.G, fam.alpha, fam.B + upper_slack, -eta - 1, eta, yval);
  ev.y_within_eta = std::abs(yval) <= static_cast<double>(eta) * model.G;
  return ev;
}

std::vector<double> binomial_pmf(std::uint32_t n, double p) {
  validate_probability(p);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double ln_fact_n = std::lgamma(n + 1.0);
  std::vector<double> pmf(n + 1);
  for (std::uint32_t m = 0; m <= n; ++m) {
    pmf[m] = std::exp(ln_fact_n - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) + m * lp +
                      (n - m) * lq);
  }
  return pmf;
}

double predicted_pmf(const LatticeModel& model, const std::vector<double>& size_pmf,
                     std::int64_t x) {
  const auto reach = static_cast<std::int64_t>(
      std::floor(10.0 * std::sqrt(model.n * model.p * model.q)));
  const double norm = 1.0 / (model.sigma_Y * std::sqrt(2.0 * std::numbers::pi));
  const double v = static_cast<double>(x) - model.mu - model.x0;
  double total = 0.0;
  for (std::int64_t t = -reach; t <= reach; ++t) {
    const std::int64_t m = model.center_size + t;
    if (m < 0 || m >= static_cast<std::int64_t>(size_pmf.size())) continue;
    const double z = (v - A_t(model, t)) / model.sigma_Y;
    total += size_pmf[static_cast<std::size_t>(m)] * norm * std::exp(-0.5 * z * z);
  }
  return total;
}

double lattice_phase(const LatticeModel& model, double v) {
  // A_t = a t^2 + b t with a = C2/pq > 0; increasing for t above -b/(2a).
  const double pq = model.p * model.q;
  const double a = model.C2 / pq;
  const double b = model.G + 2.0 * model.C2 * model.a0 / std::sqrt(pq);
  const double disc = b * b + 4.0 * a * v;
  if (disc < 0.0) return std::nan("");
  const double vertex = -b / (2.0 * a);
  auto t = static_cast<std::int64_t>(std::floor((-b + std::sqrt(disc)) / (2.0 * a)));
  while (A_t(model, t + 1) <= v) ++t;
  while (A_t(model, t) > v) --t;
  if (static_cast<double>(t) < vertex) return std::nan("");
  const double lo = A_t(model, t);
  const double hi = A_t(model, t + 1);
  return (v - lo) / (hi - lo);
}

double phase_mod_g(const LatticeModel& model, double x) {
  double r = std::fmod(x - model.mu - model.x0, model.G);
  if (r < 0.0) r += model.G;
  return r / model.G;
}

std::string lattice_model_to_json(const LatticeModel& model) {
  nlohmann::ordered_json j;
  j["n"] = model.n;
  j["k"] = model.k;
  j["p"] = model.p;
  j["q"] = model.q;
  j["center_size"] = model.center_size;
  j["a0"] = model.a0;
  j["x0"] = model.x0;
  j["C0"] = model.C0;
  j["C1"] = model.C1;
  j["C2"] = model.C2;
  j["G"] = model.G;
  j["mu"] = model.mu;
  j["delta"] = model.delta;
  j["sigma_Y"] = model.sigma_Y;
  j["sigma_total"] = model.sigma_total;
  j["eta"] = model.eta;
  return j.dump(2);
}

}  // namespace aplclt
