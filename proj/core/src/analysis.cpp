#include "screenopt/analysis.hpp"

#include "screenopt/distributions.hpp"
#include "screenopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace screenopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double residual_ss(const Vector& y, const Matrix& x) {
  if (x.cols() == 0) return y.squaredNorm();
  const Matrix q = numerics::column_basis(x);
  return (y - q * (q.transpose() * y)).squaredNorm();
}

// RSS / sigma2 with the noiseless convention: 0/0 = 0, positive/0 = inf.
double scaled(double ss, double sigma2, double scale) {
  if (sigma2 > 0.0) return ss / sigma2;
  return ss <= 1e-12 * std::max(1.0, scale) ? 0.0 : kInf;
}

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = m.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

Matrix stage1_x1(const Design& design, const std::vector<int>& active, bool reduce) {
  const Matrix x1 = main_effect_matrix(design.settings);
  if (!reduce) return x1;
  std::vector<std::size_t> keep{0};
  for (int j : active) keep.push_back(static_cast<std::size_t>(j) + 1);
  return select_columns(x1, keep);
}

// Second-order quantities after adjusting for a given X1.
struct Space {
  Matrix x1;
  Matrix x2;   // admissible raw columns
  Matrix x21;  // (I - P_X1) x2
  std::vector<Term> terms;
  std::size_t rank = 0;
  Vector y_adj;       // (I - P_X1) y
  double ss_x21 = 0;  // y' P_X21 y
};

Space make_space(const Vector& y, const Design& design, const ModelSpec& spec, const std::vector<int>& active,
                 Heredity heredity, bool reduce) {
  Space s;
  s.x1 = stage1_x1(design, active, reduce);
  const auto idx = admissible_terms(spec.terms, active, heredity);
  for (std::size_t i : idx) s.terms.push_back(spec.terms[i]);
  s.x2 = second_order_matrix(design.settings, s.terms);
  const Matrix q1 = numerics::column_basis(s.x1);
  s.x21 = s.x2 - q1 * (q1.transpose() * s.x2);
  s.y_adj = y - q1 * (q1.transpose() * y);
  if (s.x21.cols() > 0) {
    const Matrix q2 = numerics::column_basis(s.x21);
    s.rank = static_cast<std::size_t>(q2.cols());
    s.ss_x21 = (q2.transpose() * y).squaredNorm();
  }
  return s;
}

void fit_final(const Vector& y, const Design& design, const Space& space, SelectionResult& out,
               const std::vector<int>& x1_factors) {
  Matrix x(space.x1.rows(), space.x1.cols() + static_cast<Eigen::Index>(out.terms.size()));
  x.leftCols(space.x1.cols()) = space.x1;
  x.rightCols(static_cast<Eigen::Index>(out.terms.size())) = second_order_matrix(design.settings, out.terms);
  out.coefficients = x.colPivHouseholderQr().solve(y);
  out.coefficient_names = {"intercept"};
  for (int j : x1_factors) out.coefficient_names.push_back(design.names[static_cast<std::size_t>(j)]);
  for (const auto& t : out.terms) out.coefficient_names.push_back(t.label(design.names));
}

std::vector<int> x1_factor_list(const Design& design, const std::vector<int>& active, bool reduce) {
  if (reduce) return active;
  std::vector<int> all(design.factors());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  return all;
}

void keep_top(std::vector<ScoredModel>& top, ScoredModel m, std::size_t cap = 10) {
  auto pos = std::upper_bound(top.begin(), top.end(), m.score,
                              [](double v, const ScoredModel& e) { return v < e.score; });
  if (static_cast<std::size_t>(pos - top.begin()) >= cap) return;
  top.insert(pos, std::move(m));
  if (top.size() > cap) top.pop_back();
}

}  // namespace

Sigma2Estimate preselection_sigma2(const Vector& y, const Design& design, const ModelSpec& spec) {
  if (static_cast<std::size_t>(y.size()) != design.runs()) {
    throw DimensionMismatch("response length " + std::to_string(y.size()) + " differs from run count " +
                            std::to_string(design.runs()));
  }
  const ModelMatrices mm = expand_model(design, spec);
  const Matrix x = mm.full();
  const DofAccount dof = dof_from_matrix(design.settings, x);
  if (dof.g == 0) throw NoErrorDegreesOfFreedom("no error degrees of freedom (g = 0)");
  Sigma2Estimate e;
  e.g = dof.g;
  e.r = dof.r;
  e.ell = dof.ell;
  e.ss_residual = residual_ss(y, x);
  e.sigma2 = e.ss_residual / static_cast<double>(e.g);

  std::size_t groups = 0;
  const auto group = row_groups(design.settings, &groups);
  std::vector<double> sum(groups, 0.0);
  std::vector<double> count(groups, 0.0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    sum[group[i]] += y(static_cast<Eigen::Index>(i));
    count[group[i]] += 1.0;
  }
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double d = y(static_cast<Eigen::Index>(i)) - sum[group[i]] / count[group[i]];
    e.ss_pe += d * d;
  }
  e.ss_lof = std::max(0.0, e.ss_residual - e.ss_pe);
  if (e.r > 0) e.sigma2_pe = e.ss_pe / static_cast<double>(e.r);
  if (e.ell > 0) e.sigma2_lof = e.ss_lof / static_cast<double>(e.ell);
  return e;
}

Stage1Result stage1(const Vector& y, const Design& design, const ModelSpec& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  const Sigma2Estimate s2 = preselection_sigma2(y, design, spec);
  const Matrix x1 = main_effect_matrix(design.settings);
  const auto v = numerics::gram_inverse(x1);
  if (!v) throw SingularInformation("X1'X1 is singular; main effects are not estimable");
  Stage1Result r;
  r.alpha = alpha;
  r.g = s2.g;
  r.sigma2_hat = s2.sigma2;
  r.beta_hat = *v * (x1.transpose() * y);
  const double tcrit = dist::t_quantile(alpha, static_cast<int>(r.g));
  const double sigma = std::sqrt(r.sigma2_hat);
  for (std::size_t j = 0; j < design.factors(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j + 1);
    FactorTest f;
    f.estimate = r.beta_hat(jj);
    f.se = sigma * std::sqrt((*v)(jj, jj));
    if (f.se > 0.0) {
      f.t = f.estimate / f.se;
    } else {
      f.t = f.estimate == 0.0 ? 0.0 : std::copysign(kInf, f.estimate);
    }
    f.p = dist::student_t_two_sided_p(f.t, static_cast<double>(r.g));
    f.ci_low = f.estimate - tcrit * f.se;
    f.ci_high = f.estimate + tcrit * f.se;
    f.active = f.p < alpha;
    if (f.active) r.active.push_back(static_cast<int>(j));
    r.factors.push_back(f);
  }
  return r;
}

PooledSigma2 pooled_sigma2(const Vector& y, const Design& design, const ModelSpec& spec, const Stage1Result& s1) {
  const ModelMatrices mm = expand_model(design, spec);
  const Matrix x = mm.full();
  std::vector<std::size_t> keep{0};
  for (int j : s1.active) keep.push_back(static_cast<std::size_t>(j) + 1);
  for (Eigen::Index c = mm.x1.cols(); c < x.cols(); ++c) keep.push_back(static_cast<std::size_t>(c));
  const Matrix x_red = select_columns(x, keep);
  const double ss_full = residual_ss(y, x);
  const double ss_red = residual_ss(y, x_red);
  PooledSigma2 p;
  p.inactive = design.factors() - s1.active.size();
  p.ss_inactive = std::max(0.0, ss_red - ss_full);
  p.g_star = s1.g + p.inactive;
  p.sigma2 = (ss_full + p.ss_inactive) / static_cast<double>(p.g_star);
  return p;
}

Heredity parse_heredity(std::string_view text) {
  if (text == "strong") return Heredity::Strong;
  if (text == "weak") return Heredity::Weak;
  if (text == "full" || text == "none") return Heredity::Full;
  throw InvalidInput("unknown heredity '" + std::string(text) + "' (expected strong, weak or full)");
}

std::string heredity_name(Heredity h) {
  switch (h) {
    case Heredity::Strong: return "strong";
    case Heredity::Weak: return "weak";
    case Heredity::Full: return "full";
  }
  return "?";
}

std::vector<std::size_t> admissible_terms(const std::vector<Term>& terms, const std::vector<int>& active,
                                          Heredity heredity) {
  auto is_active = [&](int j) { return std::find(active.begin(), active.end(), j) != active.end(); };
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    bool ok = true;
    if (heredity == Heredity::Strong) ok = is_active(t.a) && is_active(t.b);
    if (heredity == Heredity::Weak) ok = is_active(t.a) || is_active(t.b);
    if (ok) out.push_back(i);
  }
  return out;
}

FTest overall_f_test(const Vector& y, const Design& design, const ModelSpec& spec, const PooledSigma2& pooled) {
  std::vector<int> all(design.factors());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  const Space s = make_space(y, design, spec, all, Heredity::Full, false);
  if (s.rank == 0) throw InvalidInput("overall F test needs rank(X2|1) >= 1");
  FTest f;
  f.df1 = s.rank;
  f.df2 = pooled.g_star;
  f.f = scaled(s.ss_x21 / static_cast<double>(s.rank), pooled.sigma2, y.squaredNorm());
  f.p = std::isinf(f.f) ? 0.0 : dist::f_upper_p(f.f, static_cast<double>(f.df1), static_cast<double>(f.df2));
  return f;
}

std::string status_name(SelectionStatus s) {
  switch (s) {
    case SelectionStatus::Selected: return "selected";
    case SelectionStatus::NoSecondOrder: return "no-second-order";
    case SelectionStatus::AllModelsLackOfFit: return "all-models-lack-of-fit";
  }
  return "?";
}

SelectionResult all_subsets_mbic(const Vector& y, const Design& design, const ModelSpec& spec,
                                 const Stage1Result& s1, const PooledSigma2& pooled, const MbicOptions& opts) {
  if (pooled.g_star == 0) throw NoErrorDegreesOfFreedom("no error degrees of freedom for mBIC");
  const Space sp = make_space(y, design, spec, s1.active, opts.heredity, opts.reduce_x1);
  SelectionResult out;
  out.sigma2 = pooled.sigma2;
  out.g_star = pooled.g_star;
  out.rank_x2_adj = sp.rank;

  const double n = static_cast<double>(design.runs());
  const double logn = std::log(n);
  const double k = static_cast<double>(design.factors());
  const double scale = y.squaredNorm();
  const double base = sp.y_adj.squaredNorm();
  const double const_part = scaled(std::max(0.0, base - sp.ss_x21), pooled.sigma2, scale);
  const std::size_t cap = std::min(opts.max_terms.value_or(sp.rank), sp.rank);
  const auto p = static_cast<std::size_t>(sp.x21.cols());

  std::vector<double> col_norm(p);
  double max_norm = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    col_norm[c] = sp.x21.col(static_cast<Eigen::Index>(c)).norm();
    max_norm = std::max(max_norm, col_norm[c]);
  }

  double best = kInf;
  bool have_best = false;
  std::vector<std::size_t> best_set;
  std::vector<std::size_t> chosen;
  std::vector<Vector> basis;

  // Depth-first over index sets in lexicographic order with incremental
  // Gram-Schmidt; a dependent column prunes every superset containing it.
  std::function<void(std::size_t, const Vector&, double)> visit = [&](std::size_t start, const Vector& resid,
                                                                     double ss_z) {
    const double rss = resid.squaredNorm();
    const double s = static_cast<double>(chosen.size());
    const double mbic = scaled(rss, pooled.sigma2, scale) + logn * (1.0 + k + s);
    ++out.models_scored;
    if (pooled.sigma2 > 0.0) {
      const double alt = (sp.ss_x21 - ss_z) / pooled.sigma2 + logn * s + const_part + logn * (1.0 + k);
      out.identity_residual = std::max(out.identity_residual, std::abs(mbic - alt) / std::max(1.0, std::abs(mbic)));
    }
    const double margin = std::isfinite(best) ? 1e-12 * std::max(1.0, std::abs(best)) : 0.0;
    if (!have_best || mbic < best - margin) {
      best = mbic;
      best_set = chosen;
      have_best = true;
    }
    {
      ScoredModel m;
      for (std::size_t c : chosen) m.terms.push_back(sp.terms[c]);
      m.score = mbic;
      keep_top(out.top, std::move(m));
    }
    if (chosen.size() >= cap) return;
    for (std::size_t c = start; c < p; ++c) {
      if (col_norm[c] <= 1e-10 * std::max(1.0, max_norm)) continue;
      Vector w = sp.x21.col(static_cast<Eigen::Index>(c));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w -= q * q.dot(w);
      }
      const double wn = w.norm();
      if (wn <= numerics::kRankTolerance * col_norm[c]) continue;
      const Vector q = w / wn;
      const double proj = q.dot(resid);
      basis.push_back(q);
      chosen.push_back(c);
      visit(c + 1, resid - q * proj, ss_z + proj * proj);
      chosen.pop_back();
      basis.pop_back();
    }
  };
  visit(0, sp.y_adj, 0.0);

  for (std::size_t c : best_set) out.terms.push_back(sp.terms[c]);
  out.mbic = best;
  out.status = sp.terms.empty() ? SelectionStatus::NoSecondOrder : SelectionStatus::Selected;
  fit_final(y, design, sp, out, x1_factor_list(design, s1.active, opts.reduce_x1));
  return out;
}

SelectionResult guided_subsets(const Vector& y, const Design& design, const ModelSpec& spec,
                               const Stage1Result& s1, const PooledSigma2& pooled, const GuidedOptions& opts) {
  if (pooled.g_star == 0) throw NoErrorDegreesOfFreedom("no error degrees of freedom for guided subsets");
  const Space sp = make_space(y, design, spec, s1.active, opts.heredity, opts.reduce_x1);
  SelectionResult out;
  out.sigma2 = pooled.sigma2;
  out.g_star = pooled.g_star;
  out.rank_x2_adj = sp.rank;
  out.mbic = std::numeric_limits<double>::quiet_NaN();
  const std::vector<int> x1_factors = x1_factor_list(design, s1.active, opts.reduce_x1);
  if (sp.rank == 0) {
    out.status = SelectionStatus::NoSecondOrder;
    fit_final(y, design, sp, out, x1_factors);
    return out;
  }
  const double scale = y.squaredNorm();
  FTest overall;
  overall.df1 = sp.rank;
  overall.df2 = pooled.g_star;
  overall.f = scaled(sp.ss_x21 / static_cast<double>(sp.rank), pooled.sigma2, scale);
  overall.p = std::isinf(overall.f) ? 0.0
                                    : dist::f_upper_p(overall.f, static_cast<double>(overall.df1),
                                                      static_cast<double>(overall.df2));
  out.overall = overall;
  if (overall.p >= opts.alpha) {
    out.status = SelectionStatus::NoSecondOrder;
    fit_final(y, design, sp, out, x1_factors);
    return out;
  }

  std::size_t max_size = opts.extended ? sp.rank - 1 : sp.rank / 2;
  if (opts.max_size) max_size = *opts.max_size;
  max_size = std::min(max_size, sp.rank - 1);
  const auto p = static_cast<int>(sp.x21.cols());

  for (std::size_t size = 1; size <= max_size; ++size) {
    const auto df1 = sp.rank - size;
    const double crit = dist::f_quantile(1.0 - opts.alpha, static_cast<int>(df1), static_cast<int>(pooled.g_star));
    std::vector<std::vector<std::size_t>> passing;
    std::vector<double> passing_ss;
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    if (static_cast<int>(size) > p) break;
    for (;;) {
      const Matrix z = select_columns(sp.x21, idx);
      if (numerics::numerical_rank(z) == size) {
        ++out.models_scored;
        const Matrix q = numerics::column_basis(z);
        const double ss_lof = std::max(0.0, sp.ss_x21 - (q.transpose() * y).squaredNorm());
        const double fz = scaled(ss_lof / static_cast<double>(df1), pooled.sigma2, scale);
        ScoredModel m;
        for (std::size_t c : idx) m.terms.push_back(sp.terms[c]);
        m.score = fz;
        keep_top(out.top, std::move(m));
        if (fz <= crit) {
          passing.push_back(idx);
          passing_ss.push_back(ss_lof);
        }
      }
      // next combination
      int i = static_cast<int>(size) - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == static_cast<std::size_t>(p) - size + static_cast<std::size_t>(i)) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (passing.empty()) continue;
    std::vector<std::size_t> chosen;
    if (opts.pool_passing) {
      for (const auto& set : passing) chosen.insert(chosen.end(), set.begin(), set.end());
      std::sort(chosen.begin(), chosen.end());
      chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    } else {
      std::size_t best = 0;
      for (std::size_t m = 1; m < passing.size(); ++m) {
        if (passing_ss[m] < passing_ss[best]) best = m;
      }
      chosen = passing[best];
    }
    for (std::size_t c : chosen) out.terms.push_back(sp.terms[c]);
    out.status = SelectionStatus::Selected;
    fit_final(y, design, sp, out, x1_factors);
    return out;
  }
  out.status = SelectionStatus::AllModelsLackOfFit;
  fit_final(y, design, sp, out, x1_factors);
  return out;
}

Method parse_method(std::string_view text) {
  if (text == "allsubsets" || text == "all-subsets") return Method::AllSubsets;
  if (text == "guided") return Method::Guided;
  if (text == "guided-extended") return Method::GuidedExtended;
  throw InvalidInput("unknown method '" + std::string(text) + "' (expected allsubsets, guided or guided-extended)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::AllSubsets: return "allsubsets";
    case Method::Guided: return "guided";
    case Method::GuidedExtended: return "guided-extended";
  }
  return "?";
}

AnalysisReport analyze(const Vector& y, const Design& design, const ModelSpec& spec, const AnalysisOptions& opts) {
  AnalysisReport rep;
  rep.preselection = preselection_sigma2(y, design, spec);
  rep.stage1 = stage1(y, design, spec, opts.alpha);
  if (opts.pool_inactive) {
    rep.pooled = pooled_sigma2(y, design, spec, rep.stage1);
  } else {
    rep.pooled.sigma2 = rep.stage1.sigma2_hat;
    rep.pooled.g_star = rep.stage1.g;
  }
  if (opts.method == Method::AllSubsets) {
    MbicOptions m;
    m.heredity = opts.heredity;
    m.max_terms = opts.max_terms;
    m.reduce_x1 = opts.reduce_x1;
    rep.selection = all_subsets_mbic(y, design, spec, rep.stage1, rep.pooled, m);
  } else {
    GuidedOptions g;
    g.heredity = opts.heredity;
    g.extended = opts.method == Method::GuidedExtended;
    g.pool_passing = opts.pool_passing;
    g.max_size = opts.max_terms;
    rep.selection = guided_subsets(y, design, spec, rep.stage1, rep.pooled, g);
  }
  return rep;
}

}  // namespace screenopt
