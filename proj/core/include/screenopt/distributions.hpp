#pragma once

// Thin wrappers over Boost.Math with the argument conventions used here and
// InvalidInput on bad parameters.
namespace screenopt::dist {

double student_t_cdf(double t, double df);
/// Two-sided p-value P(|T_df| >= |t|).
double student_t_two_sided_p(double t, double df);
double f_cdf(double x, double d1, double d2);
/// Upper-tail probability P(F_{d1,d2} >= x).
double f_upper_p(double x, double d1, double d2);
/// Upper alpha/2 critical value t_{alpha/2, g}.
double t_quantile(double alpha_two_sided, int g);
/// Quantile of F_{d1,d2} at lower-tail probability p.
double f_quantile(double p, int d1, int d2);
/// E[sqrt(chi^2_g / g)] = sqrt(2/g) Gamma((g+1)/2) / Gamma(g/2).
double chi_mean_sqrt(int g);

}  // namespace screenopt::dist
