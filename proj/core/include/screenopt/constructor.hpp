#pragma once

#include "screenopt/criteria.hpp"
#include "screenopt/design.hpp"
#include "screenopt/rng.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace screenopt {

struct SearchConfig {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<std::vector<double>> levels;  // empty: {-1,1}, or {-1,0,1} for quad
  ModelSpec spec;
  EciParams eci;
  std::size_t restarts = 2000;
  double retain_threshold = 1.0;  // S
  std::uint64_t seed = 1;
  std::size_t max_passes = 50;
  std::size_t replicate_enum_cap = 100000;
  std::size_t replicate_sample = 10000;
  int threads = 0;
  bool verify = false;  // compare every SMW update with a direct inverse
  bool keep_pool = true;

  void validate() const;
  std::vector<std::vector<double>> level_sets() const;
};

struct RestartTrace {
  double start = 0.0;
  double final = 0.0;
  std::size_t passes = 0;
  std::vector<double> steps;  // criterion after each accepted move
  bool pairing_ok = true;
  double max_smw_error = 0.0;  // only filled in verify mode
  bool monotone() const;
};

struct SearchResult {
  Design best;
  EciEvaluation best_eval;
  std::size_t best_restart = 0;
  std::vector<PoolEntry> pool;  // eci_total < S, first occurrence kept
  std::vector<RestartTrace> trace;
};

// Collects designs below the retention threshold, deduplicated by
// Design::canonical_key.
struct PoolSink {
  double threshold = 1.0;
  std::vector<PoolEntry> entries;
  std::unordered_set<std::string> keys;
  void offer(const Design& design, double total);
};


Design random_start(const SearchConfig& config, Rng& rng);

// Working state of one restart: the design plus its model matrices and
// (X1'X1)^-1, kept in sync by the exchange routines.
class ExchangeState {
 public:
  // `stream` seeds the sampler used when replicate assignments are too many
  // to enumerate.
  ExchangeState(Design design, const SearchConfig& config, std::uint64_t stream = 0);

  const Design& design() const { return design_; }
  const EciEvaluation& eval() const { return eval_; }
  double total() const { return eval_.total; }

  // One sweep over every D_u coordinate with first-improvement acceptance.
  bool coordinate_exchange_pass(RestartTrace* trace, PoolSink* pool);
  // Reassigns each D_r row to a unique D_u row (with replacement).
  bool optimize_replicates(RestartTrace* trace, PoolSink* pool);
  // Number of assignments optimize_replicates scored in its last call.
  std::size_t last_replicate_candidates() const { return last_candidates_; }

  // Criterion recomputed from scratch for the current design.
  EciEvaluation direct_eval() const;

 private:
  void refresh();
  void fill_row(std::size_t i);
  void record(RestartTrace* trace, PoolSink* pool);

  const SearchConfig* config_;
  Design design_;
  Matrix x1_;
  Matrix x2_;
  Matrix v_;
  EciEvaluation eval_;
  std::size_t last_candidates_ = 0;
  Rng rng_;
};

SearchResult search(const SearchConfig& config);

}  // namespace screenopt
