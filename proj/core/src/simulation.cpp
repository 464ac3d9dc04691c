#include "screenopt/simulation.hpp"

#include "screenopt/errors.hpp"
#include "screenopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace screenopt {

namespace {

std::vector<int> sorted_sample(int population, std::size_t count, Rng& rng) {
  std::vector<int> all(static_cast<std::size_t>(population));
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  std::vector<int> out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

double signed_magnitude(double offset, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  const double m = offset + expo(rng);
  return coin(rng) ? m : -m;
}

Vector gaussian(std::size_t n, double sd, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vector e(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) e(static_cast<Eigen::Index>(i)) = sd * z(rng);
  return e;
}

RepRecord score_rep(const Vector& y, const Design& design, const ModelSpec& spec, const AnalysisOptions& opts,
                    std::vector<int> truth_f, std::vector<Term> truth_a) {
  RepRecord rec;
  rec.truth_factors = std::move(truth_f);
  rec.truth_terms = std::move(truth_a);
  try {
    const AnalysisReport rep = analyze(y, design, spec, opts);
    rec.selected_factors = rep.stage1.active;
    rec.selected_terms = rep.selection.terms;
    std::sort(rec.selected_terms.begin(), rec.selected_terms.end());
    rec.status = rep.selection.status;
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  std::sort(rec.truth_terms.begin(), rec.truth_terms.end());
  return rec;
}

template <class T>
std::size_t overlap(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t c = 0;
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) ++c;
  }
  return c;
}

}  // namespace

void Scenario::validate() const {
  design.validate();
  const std::size_t k = design.factors();
  if (n_main > k) throw Infeasible("more active main effects than factors");
  const std::size_t pairs = n_main * (n_main - (n_main > 0 ? 1 : 0)) / 2;
  const bool has_2fi = std::any_of(spec.terms.begin(), spec.terms.end(), [](const Term& t) { return !t.quadratic(); });
  const bool has_quad = std::any_of(spec.terms.begin(), spec.terms.end(), [](const Term& t) { return t.quadratic(); });
  if (n_2fi > 0 && !has_2fi) throw Infeasible("model has no interaction terms");
  if (n_quad > 0 && !has_quad) throw Infeasible("model has no quadratic terms");
  if (n_2fi > pairs) throw Infeasible("more active interactions than pairs of active factors");
  if (n_quad > n_main) throw Infeasible("more active quadratics than active factors");
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be >= 0");
  if (reps == 0) throw InvalidInput("reps must be >= 1");
}

Truth gen_truth(const Scenario& scenario, Rng& rng) {
  const auto k = static_cast<int>(scenario.design.factors());
  Truth t;
  t.active = sorted_sample(k, scenario.n_main, rng);
  std::vector<Term> pairs;
  for (std::size_t a = 0; a < t.active.size(); ++a) {
    for (std::size_t b = a + 1; b < t.active.size(); ++b) pairs.push_back({t.active[a], t.active[b]});
  }
  std::vector<Term> chosen;
  for (int i : sorted_sample(static_cast<int>(pairs.size()), scenario.n_2fi, rng)) chosen.push_back(pairs[static_cast<std::size_t>(i)]);
  for (int i : sorted_sample(static_cast<int>(t.active.size()), scenario.n_quad, rng)) {
    chosen.push_back({t.active[static_cast<std::size_t>(i)], t.active[static_cast<std::size_t>(i)]});
  }
  t.beta1 = Vector::Zero(k + 1);
  for (int j : t.active) t.beta1(j + 1) = signed_magnitude(scenario.offset_main, rng);
  t.beta2 = Vector::Zero(static_cast<Eigen::Index>(scenario.spec.terms.size()));
  for (std::size_t i = 0; i < scenario.spec.terms.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), scenario.spec.terms[i]) != chosen.end()) {
      t.active_terms.push_back(scenario.spec.terms[i]);
    }
  }
  for (std::size_t i = 0; i < scenario.spec.terms.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), scenario.spec.terms[i]) != chosen.end()) {
      t.beta2(static_cast<Eigen::Index>(i)) = signed_magnitude(scenario.offset_second, rng);
    }
  }
  return t;
}

MetricsReport aggregate(const std::vector<RepRecord>& records, std::size_t k, const std::vector<Term>& terms) {
  const auto n_2fi_terms = static_cast<std::size_t>(std::count_if(terms.begin(), terms.end(), [](const Term& t) { return !t.quadratic(); }));
  const std::size_t n_q_terms = terms.size() - n_2fi_terms;
  std::size_t tp_f = 0, n_f = 0, fp_f = 0, ni_f = 0, ex_f = 0;
  std::size_t tp_2 = 0, n_2 = 0, fp_2 = 0, ni_2 = 0;
  std::size_t tp_q = 0, n_q = 0, fp_q = 0, ni_q = 0;
  std::size_t ex_a = 0, size = 0;
  MetricsReport m;
  m.records = records;
  for (const auto& r : records) {
    if (r.failed) {
      ++m.failures;
      continue;
    }
    ++m.reps;
    if (r.status == SelectionStatus::AllModelsLackOfFit) ++m.no_pass;
    const std::size_t hit_f = overlap(r.selected_factors, r.truth_factors);
    tp_f += hit_f;
    n_f += r.truth_factors.size();
    fp_f += r.selected_factors.size() - hit_f;
    ni_f += k - r.truth_factors.size();
    const bool same_f = r.selected_factors == r.truth_factors;
    ex_f += same_f ? 1 : 0;

    std::vector<Term> sel2, selq, tru2, truq;
    for (const auto& t : r.selected_terms) (t.quadratic() ? selq : sel2).push_back(t);
    for (const auto& t : r.truth_terms) (t.quadratic() ? truq : tru2).push_back(t);
    const std::size_t hit2 = overlap(sel2, tru2);
    const std::size_t hitq = overlap(selq, truq);
    tp_2 += hit2;
    n_2 += tru2.size();
    fp_2 += sel2.size() - hit2;
    ni_2 += n_2fi_terms - tru2.size();
    tp_q += hitq;
    n_q += truq.size();
    fp_q += selq.size() - hitq;
    ni_q += n_q_terms - truq.size();
    ex_a += (same_f && r.selected_terms == r.truth_terms) ? 1 : 0;
    size += r.selected_factors.size() + r.selected_terms.size();
  }
  auto rate = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.tpr_f = rate(tp_f, n_f);
  m.fpr_f = rate(fp_f, ni_f);
  m.exact_f = rate(ex_f, m.reps);
  m.tpr_2fi = rate(tp_2, n_2);
  m.fpr_2fi = rate(fp_2, ni_2);
  m.tpr_q = rate(tp_q, n_q);
  m.fpr_q = rate(fp_q, ni_q);
  m.exact_a = rate(ex_a, m.reps);
  m.mean_size = rate(size, m.reps);
  return m;
}

MetricsReport run_scenario(const Scenario& scenario) {
  scenario.validate();
  const ModelMatrices mm = expand_model(scenario.design, scenario.spec);
  const double sd = std::sqrt(scenario.sigma2);
  std::vector<RepRecord> records(scenario.reps);
  parallel_for(scenario.reps, scenario.threads, [&](std::size_t rep) {
    Rng rng = stream_rng(scenario.seed, rep);
    const Truth t = gen_truth(scenario, rng);
    const Vector y = mm.x1 * t.beta1 + mm.x2 * t.beta2 + gaussian(scenario.design.runs(), sd, rng);
    records[rep] = score_rep(y, scenario.design, scenario.spec, scenario.analysis, t.active, t.active_terms);
  });
  return aggregate(records, scenario.design.factors(), scenario.spec.terms);
}

ReplayTruth reactor_truth() {
  // Factors 2, 4, 5 with interactions 2x4 and 4x5 (0-based below).
  return {{1, 3, 4}, {{1, 3}, {3, 4}}};
}

MetricsReport reactor_replay(const Design& design, const Matrix& responses, const AnalysisOptions& opts) {
  if (static_cast<std::size_t>(responses.rows()) != design.runs()) {
    throw DimensionMismatch("response rows differ from run count");
  }
  const ModelSpec spec = ModelSpec::full(ModelOrder::TwoFactor, design.factors());
  const ReplayTruth truth = reactor_truth();
  std::vector<RepRecord> records;
  for (Eigen::Index c = 0; c < responses.cols(); ++c) {
    records.push_back(score_rep(responses.col(c), design, spec, opts, truth.factors, truth.terms));
  }
  return aggregate(records, design.factors(), spec.terms);
}

MetricsReport sim_reactor(const Design& design, const ReactorSimOptions& opts) {
  if (design.factors() != 5) throw InvalidInput("the reactor simulation needs a five-factor design");
  const ModelSpec spec = ModelSpec::full(ModelOrder::TwoFactor, 5);
  const Matrix x1 = main_effect_matrix(design.settings);
  const Matrix x2 = second_order_matrix(design.settings, spec.terms);
  std::vector<RepRecord> records(opts.reps);
  parallel_for(opts.reps, opts.threads, [&](std::size_t rep) {
    Rng rng = stream_rng(opts.seed, rep);
    // Roles of the fitted factors 2, 4, 5 go to a random ordered triple.
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    const int f2 = perm[0], f4 = perm[1], f5 = perm[2];
    Vector b1 = Vector::Zero(6);
    b1(0) = 65.5;
    b1(f2 + 1) = 9.75;
    b1(f4 + 1) = 5.375;
    b1(f5 + 1) = -3.125;
    auto term = [](int a, int b) { return Term{std::min(a, b), std::max(a, b)}; };
    std::vector<std::pair<Term, double>> inter{{term(f2, f4), 6.625}, {term(f4, f5), -5.5}};
    if (opts.variant == ReactorVariant::Plus2fi) inter.push_back({term(f2, f5), 10.0});
    Vector b2 = Vector::Zero(static_cast<Eigen::Index>(spec.terms.size()));
    std::vector<Term> truth_terms;
    for (const auto& [t, v] : inter) {
      const auto it = std::find(spec.terms.begin(), spec.terms.end(), t);
      b2(static_cast<Eigen::Index>(it - spec.terms.begin())) = v;
      truth_terms.push_back(t);
    }
    std::vector<int> truth_f{f2, f4, f5};
    std::sort(truth_f.begin(), truth_f.end());
    const Vector y = x1 * b1 + x2 * b2 + gaussian(design.runs(), opts.sigma, rng);
    records[rep] = score_rep(y, design, spec, opts.analysis, truth_f, truth_terms);
  });
  return aggregate(records, 5, spec.terms);
}

}  // namespace screenopt
