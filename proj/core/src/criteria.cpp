#include "screenopt/criteria.hpp"

#include "screenopt/distributions.hpp"
#include "screenopt/errors.hpp"
#include "screenopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace screenopt {

namespace {

Matrix require_gram_inverse(const Matrix& x1) {
  auto v = numerics::gram_inverse(x1);
  if (!v) throw SingularInformation("X1'X1 is singular; main effects are not estimable");
  return *v;
}

// t quantiles are requested for a handful of (alpha, g) pairs millions of
// times during a search.
double cached_t_quantile(double alpha, std::size_t g) {
  thread_local std::map<std::pair<double, std::size_t>, double> cache;
  const auto key = std::make_pair(alpha, g);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double t = dist::t_quantile(alpha, static_cast<int>(g));
  cache.emplace(key, t);
  return t;
}

double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

std::size_t pure_error_df(const Design& design) {
  return design.runs() - count_unique_rows(design.settings);
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// Advances `idx` to the next k-combination of {0..n-1}; false when done.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

Matrix alias_matrix(const ModelMatrices& mm) {
  const Matrix v = require_gram_inverse(mm.x1);
  return v * (mm.x1.transpose() * mm.x2);
}

AliasSummary summarize_alias(const Matrix& a) {
  AliasSummary s;
  const Eigen::Index k = a.rows() - 1;
  s.row_norms = Vector::Zero(k);
  if (k <= 0) return s;
  const auto me = a.bottomRows(k);
  for (Eigen::Index j = 0; j < k; ++j) s.row_norms(j) = me.row(j).norm();
  if (me.size() > 0) {
    s.mean_abs = me.cwiseAbs().mean();
    s.max_abs = me.cwiseAbs().maxCoeff();
  }
  return s;
}

Vector design_variances(const ModelMatrices& mm) {
  const Matrix v = require_gram_inverse(mm.x1);
  return v.diagonal().tail(v.rows() - 1);
}

void EciParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (!(tau2 >= 0.0)) throw InvalidInput("tau2 must be >= 0");
  if (r_min < 0 || ell_min < 0) throw InvalidInput("r_min and ell_min must be >= 0");
  if (r_min + ell_min < 1) throw InvalidInput("r_min + ell_min must be at least 1");
}

EciEvaluation eci_from_parts(const Matrix& v, const Matrix& x1, const Matrix& x2, const DofAccount& dof,
                             const EciParams& params) {
  EciEvaluation e;
  const Eigen::Index k = x1.cols() - 1;
  const Matrix x1x2 = x1.transpose() * x2;
  const Matrix a = v * x1x2;
  e.bias.resize(k);
  e.sqrt_v.resize(k);
  const double scale = 2.0 * params.tau2 / std::numbers::pi;
  for (Eigen::Index j = 0; j < k; ++j) {
    e.bias(j) = std::sqrt(scale * a.row(j + 1).squaredNorm());
    e.sqrt_v(j) = std::sqrt(v(j + 1, j + 1));
  }
  e.r = dof.r;
  e.ell_tilde = dof.ell;
  const auto ell_min = static_cast<std::size_t>(std::max(0, params.ell_min));
  if (dof.ell < ell_min) {
    e.penalized = true;
    e.ell_star = ell_min - dof.ell;
    e.g = dof.r + ell_min;
    if (x2.cols() > 0) {
      // X1'X1 A = X1'X2, so A'X1'X1A = (X1'X2)'A.
      const Matrix c21 = x2.transpose() * x2 - x1x2.transpose() * a;
      e.lambda_sum = numerics::sym_eigen(c21).sum_smallest_positive(e.ell_star);
    }
    e.c = cached_t_quantile(params.alpha, e.g) *
          std::sqrt(1.0 + params.tau2 / static_cast<double>(e.g) * e.lambda_sum);
  } else {
    e.g = dof.g;
    if (e.g == 0) throw NoErrorDegreesOfFreedom("design has no error degrees of freedom (g = 0)");
    e.c = cached_t_quantile(params.alpha, e.g) * dist::chi_mean_sqrt(static_cast<int>(e.g));
  }
  e.total = (e.bias + e.c * e.sqrt_v).mean();
  return e;
}

EciEvaluation eci(const Design& design, const ModelSpec& spec, const EciParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (!(params.tau2 >= 0.0)) throw InvalidInput("tau2 must be >= 0");
  const ModelMatrices mm = expand_model(design, spec);
  const Matrix v = require_gram_inverse(mm.x1);
  const DofAccount dof = dof_from_matrix(design.settings, mm.full());
  return eci_from_parts(v, mm.x1, mm.x2, dof, params);
}

Matrix centered_information(const Matrix& settings) {
  const Matrix centered = settings.rowwise() - settings.colwise().mean();
  return centered.transpose() * centered;
}

double gt_modified_d(const Design& design, double alpha) {
  const std::size_t r = pure_error_df(design);
  if (r == 0) throw NoErrorDegreesOfFreedom("modified D criterion needs pure-error df >= 1");
  const auto k = static_cast<int>(design.factors());
  const double f = dist::f_quantile(1.0 - alpha, k, static_cast<int>(r));
  return std::pow(f, k) / centered_information(design.settings).determinant();
}

double gt_modified_a(const Design& design, double alpha) {
  const std::size_t r = pure_error_df(design);
  if (r == 0) throw NoErrorDegreesOfFreedom("modified A criterion needs pure-error df >= 1");
  const auto m = numerics::inverse_spd(centered_information(design.settings));
  if (!m) throw SingularInformation("centred information matrix is singular");
  return dist::f_quantile(1.0 - alpha, 1, static_cast<int>(r)) * m->trace();
}

double log_bayes_d(const Design& design, const ModelSpec& spec, double tau2) {
  if (!(tau2 > 0.0)) throw InvalidInput("tau2 must be > 0");
  const ModelMatrices mm = expand_model(design, spec);
  const Matrix x = mm.full();
  Matrix m = x.transpose() * x;
  for (Eigen::Index t = mm.x1.cols(); t < m.rows(); ++t) m(t, t) += 1.0 / tau2;
  return -log_det_spd(m);
}

double bayes_d(const Design& design, const ModelSpec& spec, double tau2) {
  return std::exp(log_bayes_d(design, spec, tau2));
}

double d_efficiency(const Design& design) {
  const double k = static_cast<double>(design.factors());
  const double ld = log_det_spd(centered_information(design.settings));
  return std::exp(ld / k) / static_cast<double>(design.runs());
}

double d_efficiency_uncentered(const Design& design) {
  const Matrix x1 = main_effect_matrix(design.settings);
  const double ld = log_det_spd(x1.transpose() * x1);
  return std::exp(ld / static_cast<double>(x1.cols())) / static_cast<double>(design.runs());
}

RlofResult rlof_detail(const Design& design, const ModelSpec& spec, const RlofParams& params) {
  const ModelMatrices mm = expand_model(design, spec);
  RlofResult out;
  const Matrix basis = numerics::column_basis(mm.x2_adj);
  const auto rank = static_cast<std::size_t>(basis.cols());
  out.rank_x2_adj = rank;
  out.p2 = params.p2 ? *params.p2 : static_cast<int>(rank / 2);
  if (out.p2 < 0 || static_cast<std::size_t>(out.p2) > rank) {
    throw InvalidInput("p2 must lie in [0, rank(X2|1)] = [0, " + std::to_string(rank) + "]");
  }
  const auto p2 = static_cast<std::size_t>(out.p2);
  if (p2 == rank) return out;

  const Matrix b = basis.transpose() * mm.x2_adj;  // coordinates in range(X2|1)
  const int p = static_cast<int>(b.cols());
  const std::size_t keep = rank - p2;

  // Returns +inf when B_Z is rank deficient.
  auto score = [&](const std::vector<int>& z) {
    Matrix q = Matrix::Identity(b.rows(), b.rows());
    if (!z.empty()) {
      Matrix bz(b.rows(), static_cast<Eigen::Index>(z.size()));
      for (std::size_t c = 0; c < z.size(); ++c) bz.col(static_cast<Eigen::Index>(c)) = b.col(z[c]);
      if (numerics::numerical_rank(bz) < z.size()) return std::numeric_limits<double>::infinity();
      q -= numerics::projector(bz);
    }
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(p));
    std::size_t zi = 0;
    for (int i = 0; i < p; ++i) {
      if (zi < z.size() && z[zi] == i) {
        ++zi;
        continue;
      }
      d.push_back((q * b.col(i)).squaredNorm());
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
    double s = 0.0;
    for (std::size_t i = 0; i < keep; ++i) s += d[i];
    return s;
  };

  std::vector<std::vector<int>> sets;
  const double total = binomial(static_cast<std::size_t>(p), p2);
  if (total <= static_cast<double>(params.max_models)) {
    std::vector<int> idx(p2);
    for (std::size_t i = 0; i < p2; ++i) idx[i] = static_cast<int>(i);
    do sets.push_back(idx);
    while (next_combination(idx, p));
  } else {
    out.exhaustive = false;
    // Uniform sample of distinct sets. Rank-deficient draws are discarded
    // and do not count toward max_models.
    std::mt19937_64 rng(params.seed);
    std::set<std::vector<int>> seen;
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 50 * params.max_models;
    std::size_t accepted = 0;
    while (accepted < params.max_models && attempts < attempt_cap) {
      ++attempts;
      for (int i = 0; i < p; ++i) perm[static_cast<std::size_t>(i)] = i;
      for (std::size_t i = 0; i < p2; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, static_cast<std::size_t>(p) - 1);
        std::swap(perm[i], perm[pick(rng)]);
      }
      std::vector<int> z(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(p2));
      std::sort(z.begin(), z.end());
      if (!seen.insert(z).second) continue;
      if (!std::isfinite(score(z))) continue;
      sets.push_back(std::move(z));
      ++accepted;
    }
  }

  std::vector<double> values(sets.size());
  parallel_for(sets.size(), params.threads, [&](std::size_t i) { values[i] = score(sets[i]); });
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = sets.size();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    ++out.evaluated;
    if (values[i] < best) {
      best = values[i];
      best_i = i;
    }
  }
  if (best_i == sets.size()) throw Error("no full-rank second-order model of size " + std::to_string(p2));
  out.value = best;
  for (int t : sets[best_i]) out.argmin.push_back(mm.terms[static_cast<std::size_t>(t)]);
  return out;
}

double rlof(const Design& design, const ModelSpec& spec, const RlofParams& params) {
  return rlof_detail(design, spec, params).value;
}

SelectionOutcome constrained_select(const std::vector<Design>& pool, const ModelSpec& spec, double s,
                                    const EciParams& eci_params, const RlofParams& rlof_params) {
  if (pool.empty()) throw InvalidInput("design pool is empty");
  std::vector<double> totals(pool.size(), std::numeric_limits<double>::infinity());
  parallel_for(pool.size(), rlof_params.threads, [&](std::size_t i) {
    try {
      totals[i] = eci(pool[i], spec, eci_params).total;
    } catch (const Error&) {
      // undefined criterion: not eligible
    }
  });
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (totals[i] < s) eligible.push_back(i);
  }
  if (eligible.empty()) {
    throw NoDesignMeetsThreshold(
        "no design has an ECI criterion value below S; re-evaluate the pool with a larger alpha "
        "or a smaller tau2");
  }
  RlofParams inner = rlof_params;
  inner.threads = 1;
  std::vector<double> lof(eligible.size(), -std::numeric_limits<double>::infinity());
  parallel_for(eligible.size(), rlof_params.threads,
               [&](std::size_t e) { lof[e] = rlof(pool[eligible[e]], spec, inner); });
  std::size_t best = 0;
  for (std::size_t e = 1; e < eligible.size(); ++e) {
    const double d = lof[e] - lof[best];
    if (d > 1e-12 || (std::abs(d) <= 1e-12 && totals[eligible[e]] < totals[eligible[best]])) best = e;
  }
  SelectionOutcome out;
  out.index = eligible[best];
  out.eci_total = totals[out.index];
  out.rlof = lof[best];
  out.eligible = eligible.size();
  return out;
}

}  // namespace screenopt
