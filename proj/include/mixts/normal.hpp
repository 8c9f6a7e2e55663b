#pragma once

namespace mixts {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate in both tails.
double norm_cdf(double x);

/// Inverse of the standard normal CDF. Throws InputError unless 0 < p < 1.
double norm_quantile(double p);

/// Quantile of the chi-square distribution with `dof` degrees of freedom.
double chi2_quantile(double p, double dof);

/// log(y!) for a nonnegative integer-valued y.
double log_factorial(double y);

}  // namespace mixts
