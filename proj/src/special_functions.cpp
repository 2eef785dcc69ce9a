#include "fpp/special_functions.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fpp {
namespace {

using ThrowingPolicy = boost::math::policies::policy<
    boost::math::policies::domain_error<boost::math::policies::throw_on_error>,
    boost::math::policies::pole_error<boost::math::policies::throw_on_error>,
    boost::math::policies::overflow_error<boost::math::policies::throw_on_error>>;

constexpr double kSeriesSwitch = 5.0;
constexpr int kSeriesMaxTerms = 10000;
// Largest series term tolerated before cancellation costs more than ~1e-9.
constexpr long double kSeriesMaxMagnitude = 1e8L;

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(what) + ": argument must be finite and > 0, got " +
                            std::to_string(x));
  }
}

// Returns NaN when the series is not trustworthy at this argument.
double mittag_leffler_series(double beta, double x) {
  const long double lx = std::log(static_cast<long double>(x));
  long double sum = 1.0L;
  long double compensation = 0.0L;
  long double largest = 1.0L;
  for (int k = 1; k < kSeriesMaxTerms; ++k) {
    const long double magnitude =
        std::exp(k * lx - log_gamma_ext(static_cast<long double>(beta) * k + 1.0L));
    const long double term = (k % 2 == 0) ? magnitude : -magnitude;
    largest = std::max(largest, magnitude);
    if (largest > kSeriesMaxMagnitude) return std::numeric_limits<double>::quiet_NaN();
    // Neumaier summation
    const long double next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      compensation += (sum - next) + term;
    } else {
      compensation += (term - next) + sum;
    }
    sum = next;
    if (magnitude < 1e-16L * std::fabs(sum + compensation)) {
      return static_cast<double>(sum + compensation);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double mittag_leffler_integral(double beta, double x) {
  const double angle = beta * std::numbers::pi;
  const double inv_beta = 1.0 / beta;
  const auto integrand = [=](double v) {
    const double u = std::sin(angle * v) / std::sin(angle * (1.0 - v));
    return std::exp(-std::pow(x * u, inv_beta));
  };
  // v at which u(v) equals a target ratio; u is increasing on (0, 1).
  const auto v_at = [=](double u) {
    return std::atan2(u * std::sin(angle), 1.0 + u * std::cos(angle)) / angle;
  };
  // Past (x u)^{1/beta} = 50 the integrand is below e^{-50}.
  const double v_knee = v_at(1.0 / x);
  const double v_cut = std::min(1.0, v_at(std::pow(50.0, beta) / x));

  // The integrand behaves like v^{1/beta} near 0, which defeats Gauss-Kronrod
  // refinement; tanh-sinh is insensitive to endpoint irregularity.
  thread_local boost::math::quadrature::tanh_sinh<double> quadrature;
  double total = quadrature.integrate(integrand, 0.0, v_knee, 1e-12);
  if (v_cut > v_knee) total += quadrature.integrate(integrand, v_knee, v_cut, 1e-12);
  return total;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  return boost::math::lgamma(x, ThrowingPolicy());
}

long double log_gamma_ext(long double x) {
  if (!std::isfinite(x) || x <= 0.0L) {
    throw std::domain_error("log_gamma_ext: argument must be finite and > 0");
  }
  return boost::math::lgamma(x, ThrowingPolicy());
}

double beta_fn(double a, double b) {
  require_positive(a, "beta_fn");
  require_positive(b, "beta_fn");
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double mittag_leffler(double beta, double z) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::domain_error("mittag_leffler: beta must lie in (0, 1], got " +
                            std::to_string(beta));
  }
  if (!std::isfinite(z) && !(z < 0.0)) {
    throw std::domain_error("mittag_leffler: argument must be finite or -inf");
  }
  if (z > 0.0) {
    throw std::domain_error("mittag_leffler: only z <= 0 is supported, got " +
                            std::to_string(z));
  }
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  if (beta == 1.0) return std::exp(z);

  const double x = -z;
  if (x <= kSeriesSwitch) {
    const double value = mittag_leffler_series(beta, x);
    if (!std::isnan(value)) return std::clamp(value, 0.0, 1.0);
  }
  return std::clamp(mittag_leffler_integral(beta, x), 0.0, 1.0);
}

double variance_coefficient(double beta) {
  require_positive(beta, "variance_coefficient");
  return beta * beta_fn(beta, 0.5) / std::exp2(2.0 * beta - 1.0);
}

}  // namespace fpp
