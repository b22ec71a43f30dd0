// Inverse standard normal CDF: Acklam's rational approximation (relative
// error ~1e-9) followed by one Halley step against erfc.

#include <cmath>
#include <numbers>

#include "pendag/errors.hpp"
#include "pendag/estimator.hpp"

namespace pendag {

namespace {

constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                        6.680131188771972e+01,  -1.328068155288572e+01};
constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                        3.754408661907416e+00};

constexpr double kLow = 0.02425;

// Lower-tail quantile x with Phi(x) = q, q in (0, 0.5].
double lower_quantile(double q) {
  double x;
  if (q < kLow) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - q;
  const double h = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - h / (1.0 + 0.5 * x * h);
}

}  // namespace

double normal_upper_quantile(double q) {
  if (!(q > 0.0 && q <= 0.5)) throw DomainError("normal quantile level must lie in (0, 0.5]");
  return 0.0 - lower_quantile(q);
}

}  // namespace pendag
