#pragma once

#include "screenopt/analysis.hpp"
#include "screenopt/design.hpp"
#include "screenopt/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace screenopt {

struct Scenario {
  std::string name;
  Design design;
  ModelSpec spec;
  std::size_t n_main = 0;
  std::size_t n_2fi = 0;
  std::size_t n_quad = 0;
  double offset_main = 2.5;
  double offset_second = 2.5;
  double sigma2 = 1.0;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  AnalysisOptions analysis;

  void validate() const;
};

struct Truth {
  std::vector<int> active;          // sorted factor indices
  std::vector<Term> active_terms;   // in spec order
  Vector beta1;                     // intercept + k
  Vector beta2;                     // aligned with spec.terms
};

Truth gen_truth(const Scenario& scenario, Rng& rng);

struct RepRecord {
  std::vector<int> truth_factors;
  std::vector<Term> truth_terms;
  std::vector<int> selected_factors;
  std::vector<Term> selected_terms;
  SelectionStatus status = SelectionStatus::Selected;
  bool failed = false;
  std::string error;
};

struct MetricsReport {
  double tpr_f = 0.0;
  double fpr_f = 0.0;
  double exact_f = 0.0;
  double tpr_2fi = 0.0;
  double fpr_2fi = 0.0;
  double tpr_q = 0.0;
  double fpr_q = 0.0;
  double exact_a = 0.0;
  double mean_size = 0.0;
  std::size_t reps = 0;      // scored replicates
  std::size_t failures = 0;  // replicates whose analysis raised an error
  std::size_t no_pass = 0;   // guided: every model showed lack of fit
  std::vector<RepRecord> records;
};

// k and the second-order term list determine the inactive-term counts.
MetricsReport aggregate(const std::vector<RepRecord>& records, std::size_t k, const std::vector<Term>& terms);

MetricsReport run_scenario(const Scenario& scenario);

// Stage 1 + all-subsets over each response column with the fitted
// full-factorial model as truth.
struct ReplayTruth {
  std::vector<int> factors;
  std::vector<Term> terms;
};
ReplayTruth reactor_truth();
MetricsReport reactor_replay(const Design& design, const Matrix& responses, const AnalysisOptions& opts);

enum class ReactorVariant { Base, Plus2fi };
struct ReactorSimOptions {
  ReactorVariant variant = ReactorVariant::Base;
  std::size_t reps = 100;
  double sigma = 3.331;
  std::uint64_t seed = 1;
  int threads = 0;
  AnalysisOptions analysis;
};
MetricsReport sim_reactor(const Design& design, const ReactorSimOptions& opts);

}  // namespace screenopt
