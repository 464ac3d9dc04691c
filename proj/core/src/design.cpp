#include "screenopt/design.hpp"

#include "screenopt/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace screenopt {

namespace {

bool rows_equal(const Matrix& m, std::size_t i, std::size_t j) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m(static_cast<Eigen::Index>(i), c) != m(static_cast<Eigen::Index>(j), c)) return false;
  }
  return true;
}

bool contains_level(const std::vector<double>& levels, double x) {
  return std::any_of(levels.begin(), levels.end(),
                     [x](double l) { return std::abs(l - x) <= 1e-12; });
}

}  // namespace

std::vector<std::string> default_factor_names(std::size_t k) {
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

std::vector<double> infer_levels(const Matrix& settings, std::size_t column) {
  std::set<double> seen;
  for (Eigen::Index i = 0; i < settings.rows(); ++i) {
    seen.insert(settings(i, static_cast<Eigen::Index>(column)));
  }
  return {seen.begin(), seen.end()};
}

Design Design::from_settings(Matrix settings, std::vector<std::string> names) {
  Design d;
  const auto k = static_cast<std::size_t>(settings.cols());
  if (names.empty()) names = default_factor_names(k);
  if (names.size() != k) throw DimensionMismatch("factor name count does not match columns");
  d.settings = std::move(settings);
  d.names = std::move(names);
  d.replicate_of.assign(d.runs(), std::nullopt);
  d.level_sets.reserve(k);
  for (std::size_t j = 0; j < k; ++j) d.level_sets.push_back(infer_levels(d.settings, j));
  return d;
}

std::size_t Design::replicate_count() const {
  return static_cast<std::size_t>(
      std::count_if(replicate_of.begin(), replicate_of.end(), [](const auto& r) { return r.has_value(); }));
}

std::vector<std::size_t> Design::base_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < runs(); ++i) {
    if (!replicate_of[i]) out.push_back(i);
  }
  return out;
}

void Design::validate() const {
  if (settings.rows() == 0 || settings.cols() == 0) throw InvalidInput("design has no runs or no factors");
  if (replicate_of.size() != runs()) throw DimensionMismatch("replicate_of length differs from run count");
  if (names.size() != factors()) throw DimensionMismatch("factor name count differs from factor count");
  if (level_sets.size() != factors()) throw DimensionMismatch("level set count differs from factor count");
  if (!settings.allFinite()) throw InvalidInput("design contains non-finite settings");
  for (std::size_t j = 0; j < factors(); ++j) {
    for (std::size_t i = 0; i < runs(); ++i) {
      const double x = settings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12) {
        throw InvalidInput("level outside [-1, 1] in row " + std::to_string(i + 1));
      }
      if (!contains_level(level_sets[j], x)) {
        throw InvalidInput("setting in row " + std::to_string(i + 1) + " is not in the level set of " + names[j]);
      }
    }
  }
  for (std::size_t i = 0; i < runs(); ++i) {
    if (!replicate_of[i]) continue;
    const std::size_t p = *replicate_of[i];
    if (p >= runs() || p == i) throw InvalidInput("replicate_of out of range in row " + std::to_string(i + 1));
    if (replicate_of[p]) throw InvalidInput("replicate_of must point at a non-replicate row");
    if (!rows_equal(settings, i, p)) {
      throw InvalidInput("row " + std::to_string(i + 1) + " differs from its paired row " + std::to_string(p + 1));
    }
  }
}

bool Design::pairing_intact() const {
  for (std::size_t i = 0; i < runs(); ++i) {
    if (replicate_of[i] && !rows_equal(settings, i, *replicate_of[i])) return false;
  }
  return true;
}

std::string Design::canonical_key() const {
  std::vector<std::string> rows;
  rows.reserve(runs());
  char buf[32];
  for (Eigen::Index i = 0; i < settings.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < settings.cols(); ++j) {
      auto res = std::to_chars(buf, buf + sizeof buf, settings(i, j));
      row.append(buf, res.ptr);
      row.push_back(',');
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  std::string key;
  for (const auto& r : rows) {
    key += r;
    key.push_back(';');
  }
  return key;
}

std::string Term::label(const std::vector<std::string>& names) const {
  auto name = [&](int j) {
    return static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                      : "x" + std::to_string(j + 1);
  };
  if (quadratic()) return name(a) + "^2";
  return name(a) + "*" + name(b);
}

ModelSpec ModelSpec::full(ModelOrder order, std::size_t k) {
  ModelSpec spec;
  spec.order = order;
  if (order == ModelOrder::MainEffects) return spec;
  const int kk = static_cast<int>(k);
  for (int a = 0; a < kk; ++a) {
    for (int b = a + 1; b < kk; ++b) spec.terms.push_back({a, b});
  }
  if (order == ModelOrder::FullQuadratic) {
    for (int a = 0; a < kk; ++a) spec.terms.push_back({a, a});
  }
  return spec;
}

ModelSpec ModelSpec::parse(std::string_view text, std::size_t k) {
  if (text == "me" || text == "main") return full(ModelOrder::MainEffects, k);
  if (text == "2fi" || text == "interaction") return full(ModelOrder::TwoFactor, k);
  if (text == "quad" || text == "quadratic") return full(ModelOrder::FullQuadratic, k);
  throw InvalidInput("unknown model order '" + std::string(text) + "' (expected me, 2fi or quad)");
}

std::string ModelSpec::order_name() const {
  switch (order) {
    case ModelOrder::MainEffects: return "me";
    case ModelOrder::TwoFactor: return "2fi";
    case ModelOrder::FullQuadratic: return "quad";
  }
  return "?";
}

Matrix ModelMatrices::full() const {
  Matrix x(x1.rows(), x1.cols() + x2.cols());
  x << x1, x2;
  return x;
}

Matrix main_effect_matrix(const Matrix& settings) {
  Matrix x1(settings.rows(), settings.cols() + 1);
  x1.col(0).setOnes();
  x1.rightCols(settings.cols()) = settings;
  return x1;
}

Matrix second_order_matrix(const Matrix& settings, const std::vector<Term>& terms) {
  Matrix x2(settings.rows(), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    x2.col(static_cast<Eigen::Index>(t)) =
        settings.col(terms[t].a).cwiseProduct(settings.col(terms[t].b));
  }
  return x2;
}

ModelMatrices expand_model(const Design& design, const ModelSpec& spec) {
  const int k = static_cast<int>(design.factors());
  std::set<Term> seen;
  for (const auto& t : spec.terms) {
    if (t.a < 0 || t.b < 0 || t.a >= k || t.b >= k || t.a > t.b) {
      throw InvalidInput("model term references an invalid factor");
    }
    if (!seen.insert(t).second) throw InvalidInput("duplicate model term");
    if (t.quadratic() && !contains_level(design.level_sets[static_cast<std::size_t>(t.a)], 0.0)) {
      throw InvalidInput("quadratic term requested for two-level factor " +
                         design.names[static_cast<std::size_t>(t.a)]);
    }
  }
  ModelMatrices mm;
  mm.terms = spec.terms;
  mm.x1 = main_effect_matrix(design.settings);
  mm.x2 = second_order_matrix(design.settings, spec.terms);
  if (mm.x2.cols() > 0) {
    mm.x2_adj = mm.x2 - numerics::projector(mm.x1) * mm.x2;
  } else {
    mm.x2_adj.resize(mm.x1.rows(), 0);
  }
  return mm;
}

std::vector<std::size_t> row_groups(const Matrix& settings, std::size_t* group_count) {
  const auto n = static_cast<std::size_t>(settings.rows());
  std::vector<std::size_t> group(n);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t found = reps.size();
    for (std::size_t g = 0; g < reps.size(); ++g) {
      if (rows_equal(settings, i, reps[g])) {
        found = g;
        break;
      }
    }
    if (found == reps.size()) reps.push_back(i);
    group[i] = found;
  }
  if (group_count) *group_count = reps.size();
  return group;
}

std::size_t count_unique_rows(const Matrix& settings) {
  std::size_t count = 0;
  row_groups(settings, &count);
  return count;
}

DofAccount dof_from_matrix(const Matrix& settings, const Matrix& x) {
  DofAccount d;
  d.n = static_cast<std::size_t>(settings.rows());
  std::size_t groups = 0;
  const auto group = row_groups(settings, &groups);
  d.n_u = groups;
  Matrix xu(static_cast<Eigen::Index>(groups), x.cols());
  std::vector<bool> filled(groups, false);
  for (std::size_t i = 0; i < d.n; ++i) {
    if (!filled[group[i]]) {
      xu.row(static_cast<Eigen::Index>(group[i])) = x.row(static_cast<Eigen::Index>(i));
      filled[group[i]] = true;
    }
  }
  const std::size_t rank_u = numerics::numerical_rank(xu);
  d.r = d.n - d.n_u;
  d.ell = d.n_u - rank_u;
  d.g = d.r + d.ell;
  d.rank_x = rank_u;
  return d;
}

DofAccount dof_account(const Design& design, const ModelSpec& spec) {
  const ModelMatrices mm = expand_model(design, spec);
  const Matrix x = mm.full();
  DofAccount d = dof_from_matrix(design.settings, x);
  const std::size_t rank_x = numerics::numerical_rank(x);
  if (rank_x != d.rank_x) {
    throw Error("rank of X (" + std::to_string(rank_x) + ") disagrees with rank of unique rows (" +
                std::to_string(d.rank_x) + ")");
  }
  return d;
}

}  // namespace screenopt
