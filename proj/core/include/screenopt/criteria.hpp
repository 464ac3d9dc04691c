#pragma once

#include "screenopt/design.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace screenopt {

// Rows: intercept, then factors 1..k.
Matrix alias_matrix(const ModelMatrices& mm);

struct AliasSummary {
  Vector row_norms;  // sqrt(A_j A_j') for the k main-effect rows
  double mean_abs = 0.0;
  double max_abs = 0.0;
};
AliasSummary summarize_alias(const Matrix& a);

// Main-effect diagonal of (X1'X1)^-1, intercept excluded.
Vector design_variances(const ModelMatrices& mm);

struct EciParams {
  double alpha = 0.10;
  double tau2 = 20.0;
  int r_min = 0;
  int ell_min = 0;
  void validate() const;
};

struct EciEvaluation {
  Vector bias;    // sqrt(2 tau2 / pi * A_j A_j')
  Vector sqrt_v;  // sqrt(v_j)
  std::size_t r = 0;
  std::size_t ell_tilde = 0;
  std::size_t ell_star = 0;
  std::size_t g = 0;  // df used for the t quantile
  bool penalized = false;
  double lambda_sum = 0.0;
  double c = 0.0;
  double total = 0.0;
};

EciEvaluation eci(const Design& design, const ModelSpec& spec, const EciParams& params);

// Shared by eci() and the constructor. `v` is (X1'X1)^-1, x1/x2 are the
// model matrices of the candidate, dof its degree-of-freedom account.
EciEvaluation eci_from_parts(const Matrix& v, const Matrix& x1, const Matrix& x2, const DofAccount& dof,
                             const EciParams& params);

// Centred information matrix D'(I - P_1)D.
Matrix centered_information(const Matrix& settings);

double gt_modified_d(const Design& design, double alpha);
double gt_modified_a(const Design& design, double alpha);

double bayes_d(const Design& design, const ModelSpec& spec, double tau2);
double log_bayes_d(const Design& design, const ModelSpec& spec, double tau2);

// |D'(I - P_1)D|^{1/k} / n; 1 for an orthogonal +/-1 design.
double d_efficiency(const Design& design);
// |X1'X1|^{1/(k+1)} / n, kept for comparison.
double d_efficiency_uncentered(const Design& design);

struct RlofParams {
  std::optional<int> p2;  // nullopt: floor(rank(X2|1) / 2)
  std::size_t max_models = 5000;
  std::uint64_t seed = 20240601;
  int threads = 1;
};

struct RlofResult {
  double value = 0.0;
  int p2 = 0;
  std::size_t rank_x2_adj = 0;
  std::size_t evaluated = 0;  // full-rank sets scored
  bool exhaustive = true;
  std::vector<Term> argmin;   // fitted term set attaining the minimum
};

RlofResult rlof_detail(const Design& design, const ModelSpec& spec, const RlofParams& params);
double rlof(const Design& design, const ModelSpec& spec, const RlofParams& params);

struct PoolEntry {
  Design design;
  double eci_total = 0.0;
};

struct SelectionOutcome {
  std::size_t index = 0;  // into the input pool
  double eci_total = 0.0;
  double rlof = 0.0;
  std::size_t eligible = 0;
};

SelectionOutcome constrained_select(const std::vector<Design>& pool, const ModelSpec& spec, double s,
                                    const EciParams& eci_params, const RlofParams& rlof_params);

}  // namespace screenopt
