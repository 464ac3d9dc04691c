#include "screenopt/distributions.hpp"

#include "screenopt/errors.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

namespace screenopt::dist {
namespace {

void require_df(double df, const char* what) {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvalidInput(std::string(what) + ": degrees of freedom must be positive");
}

}  // namespace

double student_t_cdf(double t, double df) {
  require_df(df, "student_t_cdf");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t(df), t);
}

double student_t_two_sided_p(double t, double df) {
  require_df(df, "student_t_two_sided_p");
  if (std::isinf(t)) return 0.0;
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), std::abs(t)));
}

double f_cdf(double x, double d1, double d2) {
  require_df(d1, "f_cdf");
  require_df(d2, "f_cdf");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::cdf(boost::math::fisher_f(d1, d2), x);
}

double f_upper_p(double x, double d1, double d2) {
  require_df(d1, "f_upper_p");
  require_df(d2, "f_upper_p");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), x));
}

double t_quantile(double alpha_two_sided, int g) {
  if (g < 1) throw InvalidInput("t_quantile: g must be >= 1, got " + std::to_string(g));
  if (!(alpha_two_sided > 0.0 && alpha_two_sided < 1.0)) throw InvalidInput("t_quantile: alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::students_t(g), alpha_two_sided / 2.0));
}

double f_quantile(double p, int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw InvalidInput("f_quantile: degrees of freedom must be >= 1");
  if (!(p >= 0.0 && p < 1.0)) throw InvalidInput("f_quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  return boost::math::quantile(boost::math::fisher_f(d1, d2), p);
}

double chi_mean_sqrt(int g) {
  if (g < 1) throw InvalidInput("chi_mean_sqrt: g must be >= 1");
  const double h = static_cast<double>(g);
  return std::sqrt(2.0 / h) * boost::math::tgamma_ratio((h + 1.0) / 2.0, h / 2.0);
}

}  // namespace screenopt::dist
