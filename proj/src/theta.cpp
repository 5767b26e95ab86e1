#include "aplclt/theta.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "aplclt/errors.hpp"

namespace aplclt {

namespace {

constexpr double kPi = std::numbers::pi;

double reduce_unit(double x) { return x - std::floor(x); }

}  // namespace

ThetaEvaluator::ThetaEvaluator(double delta, double eps) : delta_(delta), eps_(eps) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError("theta profile needs delta > 0, got " + std::to_string(delta));
  }
  if (!(eps > 0.0)) throw ParameterError("theta accuracy eps must be positive");

  // Direct sum: the terms with |x - lambda| > R total at most
  // 2 exp(-R^2/delta) / (1 - exp(-2R/delta)); R = sqrt(delta ln(10/eps)) + 2
  // makes the leading factor eps/10 and the geometric factor harmless.
  lambda_cut_ = static_cast<int>(std::ceil(std::sqrt(delta * std::log(10.0 / eps)))) + 2;

  // Fourier sum: the modes m > M total at most
  // 2 sqrt(pi delta) exp(-pi^2 (M+1)^2 delta) / (1 - exp(-pi^2 delta (2M+3))).
  const double amp = 2.0 * std::sqrt(kPi * delta);
  int m = 0;
  for (;; ++m) {
    const double head = amp * std::exp(-kPi * kPi * (m + 1.0) * (m + 1.0) * delta);
    const double ratio = std::exp(-kPi * kPi * delta * (2.0 * m + 3.0));
    if (ratio < 1.0 && head / (1.0 - ratio) < eps / 10.0) break;
  }
  freq_cut_ = m;
}

double f_direct(double x, const ThetaEvaluator& ev) {
  const double xr = reduce_unit(x);
  const int cut = ev.lambda_cut();
  double sum = 0.0;
  // lambda runs over -cut..cut+1; outer terms first so the small ones are
  // not swamped.
  for (int off = cut; off >= 1; --off) {
    const double below = xr + off;         // lambda = -off
    const double above = xr - (off + 1.0);  // lambda = off + 1
    sum += std::exp(-(below * below) / ev.delta());
    sum += std::exp(-(above * above) / ev.delta());
  }
  sum += std::exp(-(xr - 1.0) * (xr - 1.0) / ev.delta());
  sum += std::exp(-(xr * xr) / ev.delta());
  return sum;
}

double f_fourier(double x, const ThetaEvaluator& ev) {
  const double xr = reduce_unit(x);
  const double delta = ev.delta();
  double sum = 0.0;
  for (int m = ev.freq_cut(); m >= 1; --m) {
    sum += std::exp(-kPi * kPi * m * m * delta) * std::cos(2.0 * kPi * m * xr);
  }
  return std::sqrt(kPi * delta) * (1.0 + 2.0 * sum);
}

namespace {

template <class F>
double golden_section(F&& objective, double lo, double hi, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExtremalRatio extremal_ratio(const ThetaEvaluator& ev) {
  constexpr int kGrid = 4096;
  const double h = 1.0 / kGrid;
  int imax = 0;
  int imin = 0;
  double fmax = -1.0;
  double fmin = 1e300;
  for (int i = 0; i < kGrid; ++i) {
    const double v = f_direct(i * h, ev);
    if (v > fmax) {
      fmax = v;
      imax = i;
    }
    if (v < fmin) {
      fmin = v;
      imin = i;
    }
  }

  // f is smooth with bounded second derivative, so the grid optimum brackets
  // the true one within one cell on either side.
  const auto fx = [&ev](double x) { return f_direct(x, ev); };
  const auto neg = [&ev](double x) { return -f_direct(x, ev); };
  double xmax = golden_section(fx, (imax - 1) * h, (imax + 1) * h, 80);
  double xmin = golden_section(neg, (imin - 1) * h, (imin + 1) * h, 80);
  // Keep the grid point when refinement cannot improve on it.
  if (f_direct(xmax, ev) < fmax) xmax = imax * h;
  if (f_direct(xmin, ev) > fmin) xmin = imin * h;

  ExtremalRatio out;
  out.x_max = xmax - std::round(xmax);
  if (out.x_max <= -0.5) out.x_max += 1.0;
  out.x_min = reduce_unit(xmin);
  out.ratio = f_direct(out.x_max, ev) / f_direct(out.x_min, ev);
  out.extremes_at_half_lattice =
      std::abs(out.x_max) <= 1e-6 && std::abs(out.x_min - 0.5) <= 1e-6;
  return out;
}

ParsevalCheck variance_lower_bound(const ThetaEvaluator& ev) {
  const double delta = ev.delta();
  ParsevalCheck out;
  // Terms decay like exp(-2 pi^2 m^2 delta); stop once the next one is
  // below eps * 1e-3 and the remaining tail is geometric.
  double sum = 0.0;
  for (int m = 1;; ++m) {
    const double term = kPi * delta * std::exp(-2.0 * kPi * kPi * m * m * delta);
    sum += term;
    const double ratio = std::exp(-2.0 * kPi * kPi * delta * (2.0 * m + 1.0));
    if (ratio < 0.5 && term * ratio / (1.0 - ratio) < ev.eps() * 1e-3) break;
    if (m > 1000000) break;
  }
  out.one_sided_sum = sum;
  out.variance_series = 2.0 * sum;

  constexpr int kNodes = 4096;
  const double mean = std::sqrt(kPi * delta);
  long double acc = 0.0L;
  for (int i = 0; i < kNodes; ++i) {
    const double dev = f_direct(static_cast<double>(i) / kNodes, ev) - mean;
    acc += static_cast<long double>(dev) * dev;
  }
  out.variance_quadrature = static_cast<double>(acc / kNodes);

  if (std::abs(out.variance_series - out.variance_quadrature) > 10.0 * ev.eps()) {
    throw InternalError("Parseval series and quadrature disagree for delta=" +
                        std::to_string(delta));
  }
  return out;
}

}  // namespace aplclt
