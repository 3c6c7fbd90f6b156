#pragma once

namespace ssid {

// Regularized lower incomplete gamma P(a, x); series for x < a+1 and a
// continued fraction otherwise.
double regularized_gamma_p(double a, double x);

// Chi-square CDF with dof degrees of freedom evaluated at x.
double chi2_cdf(int dof, double x);

// Inverse chi-square CDF: |chi2_cdf(dof, result) − confidence| <= 1e-8.
double chi2_quantile(int dof, double confidence);

}  // namespace ssid
