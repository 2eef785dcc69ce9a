#pragma once

namespace fpp {

/// ln Gamma(x) for finite x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// Extended-precision ln Gamma, used by the pmf series.
long double log_gamma_ext(long double x);

/// Euler beta function B(a, b) = exp(lnG(a) + lnG(b) - lnG(a+b)).
double beta_fn(double a, double b);

/// One-parameter Mittag-Leffler function E_beta(z) = sum_k z^k / Gamma(beta k + 1)
/// restricted to 0 < beta <= 1 and z <= 0, where it is completely monotone and
/// takes values in (0, 1].
///
/// Small |z| uses the power series with adaptive cutoff. Large |z|, or any
/// argument where the series would lose more than ~1e-9 to cancellation, uses
/// the real integral representation
///
///   E_beta(-x) = int_0^1 exp(-(x u(v))^{1/beta}) dv,
///   u(v) = sin(beta pi v) / sin(beta pi (1 - v)),
///
/// evaluated by tanh-sinh quadrature. Absolute error <= 1e-8.
double mittag_leffler(double beta, double z);

/// beta B(beta, 1/2) / 2^{2 beta - 1}; the overdispersion coefficient of the
/// fPP variance. Equals 1 at beta = 1 and exceeds 1 for beta < 1.
double variance_coefficient(double beta);

}  // namespace fpp
