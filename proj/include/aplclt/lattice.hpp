#ifndef APLCLT_LATTICE_HPP_
#define APLCLT_LATTICE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "aplclt/decomp.hpp"
#include "aplclt/params.hpp"
#include "aplclt/theta.hpp"

namespace aplclt {

/// Quadratic model of the low-degree part of the counter.
///
/// With l = sum_i y_i, kAP^1 + kAP^2 = Q(l) = C0 + C1 l + C2 l^2. The subset
/// size [pn] + t maps to l = a0 + t/sqrt(pq), so the low-degree part sits on
/// the deformed lattice x0 + A_t with A_t ~ t G. The remaining tail Y has
/// standard deviation sigma_Y of the same order as G, which is what keeps the
/// oscillation visible in the point probabilities.
struct LatticeModel {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  double p = 0.5;
  double q = 0.5;
  std::int64_t center_size = 0;  // [pn], round half up
  double a0 = 0.0;
  double x0 = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double G = 0.0;  // C1 / sqrt(pq), the dominant increment
  double mu = 0.0;  // p^k n floor(n/2)
  double delta = 0.0;
  double sigma_Y = 0.0;
  double sigma_total = 0.0;
  int eta = 1;  // default ceil(2 (ln n)^{k/2})

  double Q(double ell) const { return C0 + C1 * ell + C2 * ell * ell; }
  double sqrt_pq() const;
};

LatticeModel build_lattice_model(const APParams& params, double p, const SigmaTable& sigma);

/// A_t = Q(a0 + t/sqrt(pq)) - Q(a0), evaluated in the expanded closed form.
double A_t(const LatticeModel& model, std::int64_t t);

/// delta = 2 p q sigma_Y^2 / C1^2: the width, in units of G, of the Gaussian
/// that smears each lattice point. Throws ParameterError for non-positive
/// sigma_Y or C1.
double delta_param(const APParams& params, double p, const SigmaTable& sigma);

/// Window family L_alpha(B, s) = union over |i| <= s of
/// [G(i + alpha) - B, G(i + alpha) + B], plus the eta used by the sandwich bounds.
struct IntervalFamily {
  double alpha = 0.0;
  double B = 1.0;
  int s = 3;
  int eta = 1;

  /// B < G/2 keeps the intervals pairwise disjoint.
  bool disjoint(double G) const { return B < G / 2.0; }
};

/// O(1) membership test in L_alpha(B, s).
bool in_L_alpha(const LatticeModel& model, const IntervalFamily& fam, double v);

/// Same test for a window with explicit index range [i_lo, i_hi].
bool in_window_union(double G, double alpha, double B, std::int64_t i_lo, std::int64_t i_hi,
                     double v);

struct LProbability {
  double value = 0.0;
  /// true when (B, s) lie outside B < n^{1-1/36}, eta < s < n^{1/2-1/24}.
  bool extrapolated = false;
};

/// Leading-order P[X + Y in L_alpha(B, s)] =
/// 2 s B sqrt(2) / (sigma_Y sqrt(pi n p q)) f_delta(alpha).
/// Throws ParameterError for B <= 0 or s <= 0.
LProbability predicted_L_probability(const LatticeModel& model, const IntervalFamily& fam,
                                     const ThetaEvaluator& f_delta);

struct SandwichEvents {
  bool lhs = false;          // A_t + Y in L_alpha(B, s)
  bool rhs_lower = false;    // |t| <= s - eta and Y in L_alpha(B - C2 (s^2+s)/pq, eta)
  bool rhs_upper = false;    // |t| <= s+eta+1 and Y in the widened eta-window
  bool y_within_eta = false;  // |Y| <= eta G
  bool lower_applies = false;
  bool upper_applies = false;
};

/// Evaluates both set inclusions for X = A_t and Y = yval. The lower bound
/// holds when s > eta and B >= C2 (s^2+s)/pq; the upper when B < G/2 and
/// C2 (s+eta+2)(s+eta+3)/pq < G/2. For the upper window the index range is
/// [-eta-1, eta] and the slack C2 (s+eta+1)(s+eta+2)/pq, which is what the
/// argument actually supports. Throws RegimeError when the family is not
/// disjoint, or when neither bound's preconditions hold.
SandwichEvents sandwich_check(const LatticeModel& model, const IntervalFamily& fam,
                              std::int64_t t, double yval);

/// Distribution of the subset size: pmf[m] = C(n, m) p^m q^{n-m}.
std::vector<double> binomial_pmf(std::uint32_t n, double p);

/// Heuristic pmf of the count at integer x: a discrete Gaussian mixture
/// sum_t P[size = [pn]+t] phi(x - mu - x0 - A_t; sigma_Y), |t| <= 10 sqrt(npq).
double predicted_pmf(const LatticeModel& model, const std::vector<double>& size_pmf,
                     std::int64_t x);

/// Phase of v = x - mu - x0 inside the deformed lattice: (v - A_t)/(A_{t+1} - A_t)
/// for the t with A_t <= v < A_{t+1}. NaN where Q is not increasing.
double lattice_phase(const LatticeModel& model, double v);

/// ((x - mu - x0) mod G) / G.
double phase_mod_g(const LatticeModel& model, double x);

std::string lattice_model_to_json(const LatticeModel& model);

}  // namespace aplclt

#endif  // APLCLT_LATTICE_HPP_
