#pragma once

#include "screenopt/design.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screenopt {

struct Sigma2Estimate {
  double sigma2 = 0.0;  // y'(I - P_X)y / g
  std::size_t g = 0;
  std::size_t r = 0;
  std::size_t ell = 0;
  double ss_residual = 0.0;
  double ss_pe = 0.0;
  double ss_lof = 0.0;
  std::optional<double> sigma2_pe;   // SS_PE / r
  std::optional<double> sigma2_lof;  // SS_LOF / ell
};

Sigma2Estimate preselection_sigma2(const Vector& y, const Design& design, const ModelSpec& spec);

struct FactorTest {
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool active = false;
};

struct Stage1Result {
  Vector beta_hat;  // intercept first
  std::vector<FactorTest> factors;
  double sigma2_hat = 0.0;
  std::size_t g = 0;
  double alpha = 0.0;
  std::vector<int> active;  // F-hat, 0-based factor indices
};

Stage1Result stage1(const Vector& y, const Design& design, const ModelSpec& spec, double alpha);

struct PooledSigma2 {
  double sigma2 = 0.0;
  std::size_t g_star = 0;
  double ss_inactive = 0.0;
  std::size_t inactive = 0;
};

PooledSigma2 pooled_sigma2(const Vector& y, const Design& design, const ModelSpec& spec, const Stage1Result& s1);

enum class Heredity { Strong, Weak, Full };
Heredity parse_heredity(std::string_view text);
std::string heredity_name(Heredity h);

// Indices into `terms` admissible under the rule given active factors.
std::vector<std::size_t> admissible_terms(const std::vector<Term>& terms, const std::vector<int>& active,
                                          Heredity heredity);

struct FTest {
  double f = 0.0;
  double p = 1.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
};

// Overall test of every second-order column in `spec` given the full
// main-effect model.
FTest overall_f_test(const Vector& y, const Design& design, const ModelSpec& spec, const PooledSigma2& pooled);

enum class SelectionStatus {
  Selected,
  NoSecondOrder,        // overall test not rejected, or no admissible terms
  AllModelsLackOfFit,   // guided: every model up to the size bound failed
};
std::string status_name(SelectionStatus s);

struct ScoredModel {
  std::vector<Term> terms;
  double score = 0.0;
};

struct SelectionResult {
  SelectionStatus status = SelectionStatus::Selected;
  std::vector<Term> terms;
  double mbic = 0.0;
  double sigma2 = 0.0;
  std::size_t g_star = 0;
  std::size_t rank_x2_adj = 0;
  std::size_t models_scored = 0;
  double identity_residual = 0.0;  // max |mBIC - F_Z form| over scored models
  std::optional<FTest> overall;
  std::vector<ScoredModel> top;    // best 10 by score
  std::vector<std::string> coefficient_names;
  Vector coefficients;
};

struct MbicOptions {
  Heredity heredity = Heredity::Strong;
  std::optional<std::size_t> max_terms;  // default rank(X2|1)
  bool reduce_x1 = true;                 // X1 restricted to F-hat
};

SelectionResult all_subsets_mbic(const Vector& y, const Design& design, const ModelSpec& spec,
                                 const Stage1Result& s1, const PooledSigma2& pooled, const MbicOptions& opts);

struct GuidedOptions {
  Heredity heredity = Heredity::Strong;
  double alpha = 0.20;
  std::optional<std::size_t> max_size;  // default floor(rank(X2|1) / 2)
  bool extended = false;                // max_size = rank(X2|1) - 1
  bool pool_passing = false;            // union of all passing models
  bool reduce_x1 = false;
};

SelectionResult guided_subsets(const Vector& y, const Design& design, const ModelSpec& spec,
                               const Stage1Result& s1, const PooledSigma2& pooled, const GuidedOptions& opts);

enum class Method { AllSubsets, Guided, GuidedExtended };
Method parse_method(std::string_view text);
std::string method_name(Method m);

struct AnalysisOptions {
  double alpha = 0.10;
  Method method = Method::AllSubsets;
  Heredity heredity = Heredity::Strong;
  bool reduce_x1 = true;
  bool pool_inactive = true;
  bool pool_passing = false;
  std::optional<std::size_t> max_terms;
};

struct AnalysisReport {
  Sigma2Estimate preselection;
  Stage1Result stage1;
  PooledSigma2 pooled;
  SelectionResult selection;
};

AnalysisReport analyze(const Vector& y, const Design& design, const ModelSpec& spec, const AnalysisOptions& opts);

}  // namespace screenopt
