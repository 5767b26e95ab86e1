#ifndef APLCLT_THETA_HPP_
#define APLCLT_THETA_HPP_

namespace aplclt {

/// The 1-periodic profile f(x) = sum_{lambda in Z} exp(-(x - lambda)^2 / delta)
/// together with truncation radii for its two series representations.
class ThetaEvaluator {
 public:
  /// Throws ParameterError unless delta > 0 and eps > 0.
  explicit ThetaEvaluator(double delta, double eps = 1e-14);

  double delta() const { return delta_; }
  double eps() const { return eps_; }
  int lambda_cut() const { return lambda_cut_; }
  int freq_cut() const { return freq_cut_; }

 private:
  double delta_;
  double eps_;
  int lambda_cut_;
  int freq_cut_;
};

/// Direct lattice sum over |x - lambda| <= lambda_cut.
double f_direct(double x, const ThetaEvaluator& ev);

/// Fourier series sqrt(pi delta) (1 + 2 sum_{m>=1} exp(-pi^2 m^2 delta) cos(2 pi m x)).
double f_fourier(double x, const ThetaEvaluator& ev);

struct ExtremalRatio {
  double x_max = 0.0;  // reduced to (-1/2, 1/2]
  double x_min = 0.5;  // reduced to [0, 1)
  double ratio = 1.0;  // f(x_max) / f(x_min)
  /// Whether the search found the maximum at Z and the minimum at 1/2 + Z
  /// (to 1e-6). Not guaranteed once f is flat below double resolution.
  bool extremes_at_half_lattice = false;
};

/// 4096-point grid scan followed by golden-section refinement.
ExtremalRatio extremal_ratio(const ThetaEvaluator& ev);

struct ParsevalCheck {
  /// sum_{m>=1} fhat(m)^2 = sum_{m>=1} pi delta exp(-2 pi^2 m^2 delta); a
  /// positive lower bound on the variance of f over one period.
  double one_sided_sum = 0.0;
  /// sum_{m != 0} fhat(m)^2, which equals the variance exactly.
  double variance_series = 0.0;
  /// int_0^1 (f - sqrt(pi delta))^2 dx by the periodic trapezoid rule.
  double variance_quadrature = 0.0;
};

/// Throws InternalError when series and quadrature differ by more than 10 eps.
ParsevalCheck variance_lower_bound(const ThetaEvaluator& ev);

}  // namespace aplclt

#endif  // APLCLT_THETA_HPP_
