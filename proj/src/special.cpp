#include "spherecover/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace spherecover {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfTolerance = 1e-16;
constexpr int kCfMaxIterations = 200000;

double log_beta(double a, double b) {
  // The cap fraction only ever asks for b = 1/2 with a up to n/2; the gamma
  // ratio keeps full relative accuracy there where lgamma differences do not.
  if (b == 0.5) {
    return 0.5 * std::log(M_PI) + std::log(boost::math::tgamma_delta_ratio(a, 0.5));
  }
  if (a == 0.5) {
    return 0.5 * std::log(M_PI) + std::log(boost::math::tgamma_delta_ratio(b, 0.5));
  }
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfTolerance) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double log_ibeta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_ibeta: a and b must be positive");
  if (x < 0.0 || y < 0.0 || std::fabs(x + y - 1.0) > 1e-12) {
    throw std::invalid_argument("log_ibeta: need x, y >= 0 with x + y = 1");
  }
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (y == 0.0) return 0.0;

  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_front + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
  }
  // Complement branch: I_x(a,b) = 1 - I_y(b,a).
  const double complement = std::exp(log_front + std::log(beta_continued_fraction(b, a, y)) - std::log(b));
  return std::log1p(-std::min(complement, 1.0));
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

}  // namespace spherecover
