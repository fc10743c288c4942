#pragma once

namespace hibreg {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc based).
double norm_cdf(double x);

/// Standard normal quantile function (Wichura's AS 241, double precision).
/// Throws DomainError for p outside (0, 1).
double norm_quantile(double p);

/// Logistic CDF 1 / (1 + exp(-x)).
double logistic_cdf(double x);

/// Logit of p; throws DomainError for p outside (0, 1).
double logit(double p);

}  // namespace hibreg
