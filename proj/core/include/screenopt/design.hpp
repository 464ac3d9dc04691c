#pragma once

#include "screenopt/numerics.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screenopt {

// n x k settings plus the replicate structure. Rows with replicate_of set
// form D_r; each points at the D_u row it copies.
struct Design {
  Matrix settings;
  std::vector<std::optional<std::size_t>> replicate_of;
  std::vector<std::string> names;
  std::vector<std::vector<double>> level_sets;  // sorted, per factor

  static Design from_settings(Matrix settings, std::vector<std::string> names = {});

  std::size_t runs() const { return static_cast<std::size_t>(settings.rows()); }
  std::size_t factors() const { return static_cast<std::size_t>(settings.cols()); }
  std::size_t replicate_count() const;

  // Indices of rows that are not declared replicates, in row order.
  std::vector<std::size_t> base_rows() const;

  // Throws InvalidInput when a level is outside its level set, a pairing
  // points at a replicate or out of range, or a paired row differs.
  void validate() const;
  bool pairing_intact() const;

  // Rows sorted lexicographically, joined into one key. Used to dedupe pools.
  std::string canonical_key() const;
};

std::vector<std::string> default_factor_names(std::size_t k);
std::vector<double> infer_levels(const Matrix& settings, std::size_t column);

enum class ModelOrder { MainEffects, TwoFactor, FullQuadratic };

struct Term {
  int a = 0;
  int b = 0;  // a == b means the quadratic d_a^2
  bool quadratic() const { return a == b; }
  bool involves(int factor) const { return a == factor || b == factor; }
  std::string label(const std::vector<std::string>& names) const;
  auto operator<=>(const Term&) const = default;
};

struct ModelSpec {
  ModelOrder order = ModelOrder::TwoFactor;
  std::vector<Term> terms;

  // Interactions in lexicographic (j, j') order, then quadratics.
  static ModelSpec full(ModelOrder order, std::size_t k);
  // Accepts "me", "2fi", "quad" (also "main", "interaction", "quadratic").
  static ModelSpec parse(std::string_view text, std::size_t k);
  std::string order_name() const;
};

struct ModelMatrices {
  Matrix x1;      // intercept + main effects
  Matrix x2;      // second-order columns, in spec order
  Matrix x2_adj;  // (I - P_X1) X2
  std::vector<Term> terms;

  Matrix full() const;
};

Matrix main_effect_matrix(const Matrix& settings);
Matrix second_order_matrix(const Matrix& settings, const std::vector<Term>& terms);

ModelMatrices expand_model(const Design& design, const ModelSpec& spec);

struct DofAccount {
  std::size_t n = 0;
  std::size_t n_u = 0;
  std::size_t r = 0;    // pure error
  std::size_t ell = 0;  // lack of fit
  std::size_t g = 0;
  std::size_t rank_x = 0;
};

DofAccount dof_account(const Design& design, const ModelSpec& spec);
DofAccount dof_from_matrix(const Matrix& settings, const Matrix& x);

// Groups identical rows; returns one group id per row (ids follow first
// appearance) and the number of groups.
std::vector<std::size_t> row_groups(const Matrix& settings, std::size_t* group_count = nullptr);
std::size_t count_unique_rows(const Matrix& settings);

}  // namespace screenopt
