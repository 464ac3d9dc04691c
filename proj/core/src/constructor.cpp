#include "screenopt/constructor.hpp"

#include "screenopt/errors.hpp"
#include "screenopt/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace screenopt {

namespace {

constexpr double kImprovement = 1e-10;

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix x(a.rows(), a.cols() + b.cols());
  x << a, b;
  return x;
}

double relative_gap(const Matrix& a, const Matrix& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

}  // namespace

void SearchConfig::validate() const {
  if (k == 0 || n == 0) throw InvalidInput("k and n must be positive");
  if (restarts == 0) throw InvalidInput("restarts must be >= 1");
  eci.validate();
  if (static_cast<std::size_t>(eci.r_min) + 1 > n) throw Infeasible("r_min must be at most n - 1");
  if (n - static_cast<std::size_t>(eci.r_min) < k + 1) {
    throw Infeasible("n - r_min = " + std::to_string(n - static_cast<std::size_t>(eci.r_min)) +
                     " unique runs cannot support " + std::to_string(k + 1) + " main-effect parameters");
  }
  const auto sets = level_sets();
  if (sets.size() != k) throw DimensionMismatch("level set count differs from k");
  for (const auto& s : sets) {
    if (s.size() < 2) throw InvalidInput("every factor needs at least two levels");
    for (double x : s) {
      if (x < -1.0 || x > 1.0) throw InvalidInput("levels must lie in [-1, 1]");
    }
  }
}

std::vector<std::vector<double>> SearchConfig::level_sets() const {
  if (!levels.empty()) {
    auto out = levels;
    for (auto& s : out) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return out;
  }
  const bool three = spec.order == ModelOrder::FullQuadratic;
  return std::vector<std::vector<double>>(k, three ? std::vector<double>{-1.0, 0.0, 1.0}
                                                   : std::vector<double>{-1.0, 1.0});
}

bool RestartTrace::monotone() const {
  double prev = start;
  for (double s : steps) {
    if (!(s < prev)) return false;
    prev = s;
  }
  return true;
}

void PoolSink::offer(const Design& design, double total) {
  if (!(total < threshold)) return;
  std::string key = design.canonical_key();
  if (!keys.insert(key).second) return;
  entries.push_back({design, total});
}

Design random_start(const SearchConfig& config, Rng& rng) {
  config.validate();
  const auto levels = config.level_sets();
  const std::size_t n_u = config.n - static_cast<std::size_t>(config.eci.r_min);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix s(static_cast<Eigen::Index>(config.n), static_cast<Eigen::Index>(config.k));
    std::vector<std::optional<std::size_t>> rep(config.n);
    for (std::size_t i = 0; i < n_u; ++i) {
      for (std::size_t j = 0; j < config.k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, levels[j].size() - 1);
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = levels[j][pick(rng)];
      }
    }
    for (std::size_t i = n_u; i < config.n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, n_u - 1);
      const std::size_t src = pick(rng);
      s.row(static_cast<Eigen::Index>(i)) = s.row(static_cast<Eigen::Index>(src));
      rep[i] = src;
    }
    if (numerics::numerical_rank(main_effect_matrix(s)) < config.k + 1) continue;
    Design d = Design::from_settings(std::move(s));
    d.replicate_of = std::move(rep);
    d.level_sets = levels;
    return d;
  }
  throw Infeasible("could not draw a design with full-rank X1 in 100 attempts");
}

ExchangeState::ExchangeState(Design design, const SearchConfig& config, std::uint64_t stream)
    : config_(&config), design_(std::move(design)), rng_(stream) {
  x1_ = main_effect_matrix(design_.settings);
  x2_ = second_order_matrix(design_.settings, config.spec.terms);
  refresh();
}

void ExchangeState::refresh() {
  auto v = numerics::gram_inverse(x1_);
  if (!v) throw SingularInformation("X1'X1 is singular for the current design");
  v_ = std::move(*v);
  eval_ = eci_from_parts(v_, x1_, x2_, dof_from_matrix(design_.settings, hstack(x1_, x2_)), config_->eci);
}

EciEvaluation ExchangeState::direct_eval() const {
  return eci(design_, config_->spec, config_->eci);
}

void ExchangeState::fill_row(std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  x1_.row(r).tail(x1_.cols() - 1) = design_.settings.row(r);
  const auto& terms = config_->spec.terms;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    x2_(r, static_cast<Eigen::Index>(t)) = design_.settings(r, terms[t].a) * design_.settings(r, terms[t].b);
  }
}

void ExchangeState::record(RestartTrace* trace, PoolSink* pool) {
  if (trace) {
    trace->steps.push_back(eval_.total);
    if (!design_.pairing_intact()) trace->pairing_ok = false;
    if (config_->verify) {
      const auto direct_v = numerics::gram_inverse(x1_);
      double gap = direct_v ? relative_gap(v_, *direct_v) : std::numeric_limits<double>::infinity();
      const double direct_total = direct_eval().total;
      gap = std::max(gap, std::abs(direct_total - eval_.total) / std::max(1.0, std::abs(direct_total)));
      trace->max_smw_error = std::max(trace->max_smw_error, gap);
    }
  }
  if (pool) pool->offer(design_, eval_.total);
}

bool ExchangeState::coordinate_exchange_pass(RestartTrace* trace, PoolSink* pool) {
  refresh();
  const auto& levels = design_.level_sets;
  const std::size_t n = design_.runs();
  const std::size_t k = design_.factors();
  bool improved = false;
  for (std::size_t i : design_.base_rows()) {
    std::vector<std::size_t> rows{i};
    for (std::size_t q = 0; q < n; ++q) {
      if (design_.replicate_of[q] == i) rows.push_back(q);
    }
    const int copies = static_cast<int>(rows.size());
    for (std::size_t j = 0; j < k; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      for (double level : levels[j]) {
        const double current = design_.settings(static_cast<Eigen::Index>(i), col);
        if (level == current) continue;
        const Vector x_old = x1_.row(static_cast<Eigen::Index>(i)).transpose();
        Vector x_new = x_old;
        x_new(col + 1) = level;
        auto v_new = numerics::smw_update(v_, x_old, x_new, copies);
        if (!v_new) continue;
        for (std::size_t q : rows) {
          design_.settings(static_cast<Eigen::Index>(q), col) = level;
          fill_row(q);
        }
        bool accept = false;
        EciEvaluation cand;
        try {
          const DofAccount dof = dof_from_matrix(design_.settings, hstack(x1_, x2_));
          cand = eci_from_parts(*v_new, x1_, x2_, dof, config_->eci);
          accept = cand.total < eval_.total - kImprovement;
        } catch (const NoErrorDegreesOfFreedom&) {
          accept = false;
        }
        if (accept) {
          v_ = std::move(*v_new);
          eval_ = std::move(cand);
          improved = true;
          record(trace, pool);
        } else {
          for (std::size_t q : rows) {
            design_.settings(static_cast<Eigen::Index>(q), col) = current;
            fill_row(q);
          }
        }
      }
    }
  }
  return improved;
}

bool ExchangeState::optimize_replicates(RestartTrace* trace, PoolSink* pool) {
  last_candidates_ = 0;
  std::vector<std::size_t> reps;
  for (std::size_t q = 0; q < design_.runs(); ++q) {
    if (design_.replicate_of[q]) reps.push_back(q);
  }
  if (reps.empty()) return false;
  const auto base = design_.base_rows();

  // Distinct D_u rows, first occurrence wins.
  std::vector<std::size_t> uniq;
  for (std::size_t b : base) {
    const auto row = design_.settings.row(static_cast<Eigen::Index>(b));
    const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](std::size_t u) {
      return design_.settings.row(static_cast<Eigen::Index>(u)) == row;
    });
    if (!dup) uniq.push_back(b);
  }
  Matrix x1u(static_cast<Eigen::Index>(base.size()), x1_.cols());
  for (std::size_t t = 0; t < base.size(); ++t) x1u.row(static_cast<Eigen::Index>(t)) = x1_.row(static_cast<Eigen::Index>(base[t]));
  const auto vu = numerics::gram_inverse(x1u);

  const std::size_t m = reps.size();
  const std::size_t u = uniq.size();
  std::vector<std::size_t> incumbent(m);
  for (std::size_t t = 0; t < m; ++t) {
    const auto row = design_.settings.row(static_cast<Eigen::Index>(reps[t]));
    for (std::size_t c = 0; c < u; ++c) {
      if (design_.settings.row(static_cast<Eigen::Index>(uniq[c])) == row) {
        incumbent[t] = c;
        break;
      }
    }
  }

  std::vector<std::vector<std::size_t>> assignments;
  const double combos = std::pow(static_cast<double>(u), static_cast<double>(m));
  if (combos <= static_cast<double>(config_->replicate_enum_cap)) {
    std::vector<std::size_t> a(m, 0);
    for (;;) {
      assignments.push_back(a);
      std::size_t pos = m;
      while (pos > 0) {
        --pos;
        if (++a[pos] < u) break;
        a[pos] = 0;
        if (pos == 0) {
          pos = m + 1;
          break;
        }
      }
      if (pos == m + 1) break;
    }
  } else {
    assignments.push_back(incumbent);
    std::uniform_int_distribution<std::size_t> pick(0, u - 1);
    for (std::size_t s = 0; s < config_->replicate_sample; ++s) {
      std::vector<std::size_t> a(m);
      for (auto& x : a) x = pick(rng_);
      assignments.push_back(std::move(a));
    }
  }
  last_candidates_ = assignments.size();

  Matrix settings = design_.settings;
  Matrix x1 = x1_;
  Matrix x2 = x2_;
  Matrix rows(static_cast<Eigen::Index>(m), x1_.cols());
  double best_total = eval_.total - kImprovement;
  const std::vector<std::size_t>* best_a = nullptr;
  EciEvaluation best_eval;
  Matrix best_v;
  for (const auto& a : assignments) {
    for (std::size_t t = 0; t < m; ++t) {
      const auto dst = static_cast<Eigen::Index>(reps[t]);
      const auto src = static_cast<Eigen::Index>(uniq[a[t]]);
      settings.row(dst) = design_.settings.row(src);
      x1.row(dst) = x1_.row(src);
      x2.row(dst) = x2_.row(src);
      rows.row(static_cast<Eigen::Index>(t)) = x1_.row(src);
    }
    std::optional<Matrix> v = vu ? numerics::woodbury_add_rows(*vu, rows) : numerics::gram_inverse(x1);
    if (!v) continue;
    try {
      EciEvaluation e = eci_from_parts(*v, x1, x2, dof_from_matrix(settings, hstack(x1, x2)), config_->eci);
      if (e.total < best_total) {
        best_total = e.total;
        best_a = &a;
        best_eval = std::move(e);
        best_v = std::move(*v);
      }
    } catch (const NoErrorDegreesOfFreedom&) {
    }
  }
  if (!best_a) return false;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t dst = reps[t];
    const std::size_t src = uniq[(*best_a)[t]];
    design_.settings.row(static_cast<Eigen::Index>(dst)) = design_.settings.row(static_cast<Eigen::Index>(src));
    design_.replicate_of[dst] = src;
    fill_row(dst);
  }
  v_ = std::move(best_v);
  eval_ = std::move(best_eval);
  record(trace, pool);
  return true;
}

SearchResult search(const SearchConfig& config) {
  config.validate();
  struct Output {
    Design design;
    EciEvaluation eval;
    RestartTrace trace;
    std::vector<PoolEntry> pool;
  };
  std::vector<Output> outs(config.restarts);
  parallel_for(config.restarts, config.threads, [&](std::size_t r) {
    Rng rng = stream_rng(config.seed, r);
    Design start = random_start(config, rng);
    ExchangeState state(std::move(start), config, rng());
    PoolSink sink;
    sink.threshold = config.retain_threshold;
    PoolSink* pool = config.keep_pool ? &sink : nullptr;
    RestartTrace trace;
    trace.start = state.total();
    if (pool) pool->offer(state.design(), state.total());
    const bool has_reps = state.design().replicate_count() > 0;
    while (trace.passes < config.max_passes) {
      ++trace.passes;
      bool improved = state.coordinate_exchange_pass(&trace, pool);
      if (has_reps) improved = state.optimize_replicates(&trace, pool) || improved;
      if (!improved) break;
    }
    trace.final = state.total();
    outs[r] = Output{state.design(), state.eval(), std::move(trace), std::move(sink.entries)};
  });

  SearchResult result;
  std::unordered_set<std::string> keys;
  for (std::size_t r = 0; r < outs.size(); ++r) {
    if (r == 0 || outs[r].eval.total < result.best_eval.total) {
      result.best = outs[r].design;
      result.best_eval = outs[r].eval;
      result.best_restart = r;
    }
    for (auto& e : outs[r].pool) {
      if (keys.insert(e.design.canonical_key()).second) result.pool.push_back(std::move(e));
    }
    result.trace.push_back(std::move(outs[r].trace));
  }
  return result;
}

}  // namespace screenopt
