// screenopt command-line tool.
//
//   screenopt evaluate  design.csv [--model 2fi] [--alpha] [--tau2] [--p2]
//   screenopt construct config.json --out-dir DIR
//   screenopt select    pool.json [--S 1] [--p2 auto] [--out best.csv]
//   screenopt analyze   design.csv y.csv [--alpha] [--method] [--heredity]
//   screenopt simulate  scenario.json [--out metrics.json]
//   screenopt catalog   --dsd k | --adsd k f [--drop-center]
//
// Exit codes: 0 ok, 2 invalid input, 3 no design meets threshold,
// 4 no error degrees of freedom, 1 anything else.
#include "screenopt/analysis.hpp"
#include "screenopt/catalog.hpp"
#include "screenopt/constructor.hpp"
#include "screenopt/criteria.hpp"
#include "screenopt/design_io.hpp"
#include "screenopt/errors.hpp"
#include "screenopt/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef SCREENOPT_VERSION
#define SCREENOPT_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace screenopt;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

json provenance(const json& config, std::optional<std::uint64_t> seed) {
  json p;
  p["tool"] = "screenopt";
  p["version"] = SCREENOPT_VERSION;
  p["seed"] = seed ? json(*seed) : json(nullptr);
  p["config_hash"] = "fnv1a64:" + hex64(fnv1a(config.dump()));
  return p;
}

std::string csv_header(const json& prov) {
  std::string seed = prov["seed"].is_null() ? "none" : std::to_string(prov["seed"].get<std::uint64_t>());
  return "# screenopt " + prov["version"].get<std::string>() + " seed=" + seed + " config=" +
         prov["config_hash"].get<std::string>() + "\n";
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json terms_json(const std::vector<Term>& terms, const std::vector<std::string>& names) {
  json a = json::array();
  for (const auto& t : terms) a.push_back(t.label(names));
  return a;
}

json factors_json(const std::vector<int>& f, const std::vector<std::string>& names) {
  json a = json::array();
  for (int j : f) a.push_back(names[static_cast<std::size_t>(j)]);
  return a;
}

json design_json(const Design& d) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.settings.rows(); ++i) rows.push_back(to_json(d.settings.row(i).transpose()));
  json rep = json::array();
  for (const auto& r : d.replicate_of) rep.push_back(r ? json(*r + 1) : json(nullptr));
  return json{{"names", d.names}, {"rows", rows}, {"replicate_of", rep}};
}

Design design_from_json(const json& j) {
  const auto& rows = j.at("rows");
  if (rows.empty()) throw InvalidInput("pool design has no rows");
  const std::size_t k = rows[0].size();
  Matrix s(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) throw InvalidInput("ragged design rows in pool");
    for (std::size_t c = 0; c < k; ++c)
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
  }
  Design d = Design::from_settings(s, j.value("names", std::vector<std::string>{}));
  if (j.contains("replicate_of")) {
    const auto& rep = j.at("replicate_of");
    if (rep.size() != d.runs()) throw InvalidInput("replicate_of length does not match rows");
    for (std::size_t i = 0; i < rep.size(); ++i) {
      if (rep[i].is_null()) continue;
      const auto one_based = rep[i].get<std::size_t>();
      if (one_based == 0) throw InvalidInput("replicate_of is 1-based");
      d.replicate_of[i] = one_based - 1;
    }
  }
  d.validate();
  return d;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + out);
  f << text;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path);
  f << text;
}

int threads_from(int flag) {
  if (const char* env = std::getenv("SCREENOPT_THREADS")) {
    try {
      return std::stoi(env);
    } catch (...) {
      throw InvalidInput(std::string("SCREENOPT_THREADS is not an integer: ") + env);
    }
  }
  return flag;
}

json eci_json(const EciEvaluation& e) {
  return json{{"total", e.total},         {"bias", to_json(e.bias)},     {"sqrt_v", to_json(e.sqrt_v)},
              {"r", e.r},                 {"ell_tilde", e.ell_tilde},    {"ell_star", e.ell_star},
              {"g", e.g},                 {"penalized", e.penalized},    {"lambda_sum", e.lambda_sum},
              {"c", e.c}};
}

json sigma_json(const Sigma2Estimate& s) {
  json j{{"sigma2", s.sigma2}, {"g", s.g},          {"r", s.r},          {"ell", s.ell},
         {"ss_residual", s.ss_residual}, {"ss_pe", s.ss_pe}, {"ss_lof", s.ss_lof}};
  j["sigma2_pe"] = s.sigma2_pe ? json(*s.sigma2_pe) : json(nullptr);
  j["sigma2_lof"] = s.sigma2_lof ? json(*s.sigma2_lof) : json(nullptr);
  return j;
}

json metrics_json(const MetricsReport& m) {
  return json{{"TPR_F", m.tpr_f},     {"FPR_F", m.fpr_f},     {"exact_F", m.exact_f},
              {"TPR_2FI", m.tpr_2fi}, {"FPR_2FI", m.fpr_2fi}, {"TPR_Q", m.tpr_q},
              {"FPR_Q", m.fpr_q},     {"exact_A", m.exact_a}, {"mean_size", m.mean_size},
              {"reps", m.reps},       {"failures", m.failures}, {"no_pass", m.no_pass}};
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string design;
  std::string model = "2fi";
  double alpha = 0.10;
  double tau2 = 20.0;
  int r_min = 0;
  int ell_min = 0;
  std::string p2 = "auto";
  std::size_t max_models = 5000;
  std::string out;
};

std::optional<int> parse_p2(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size() || v < 0) throw InvalidInput("");
    return v;
  } catch (...) {
    throw InvalidInput("--p2 must be 'auto' or a non-negative integer, got '" + s + "'");
  }
}

int run_evaluate(const EvaluateArgs& a) {
  const Design d = load_design_csv(a.design);
  const ModelSpec spec = ModelSpec::parse(a.model, d.factors());
  EciParams ep{a.alpha, a.tau2, a.r_min, a.ell_min};
  RlofParams rp;
  rp.p2 = parse_p2(a.p2);
  rp.max_models = a.max_models;
  json cfg{{"command", "evaluate"}, {"design", fs::path(a.design).filename().string()}, {"model", spec.order_name()},
           {"alpha", a.alpha}, {"tau2", a.tau2}, {"r_min", a.r_min}, {"ell_min", a.ell_min}, {"p2", a.p2}};
  json out;
  out["provenance"] = provenance(cfg, std::nullopt);
  out["runs"] = d.runs();
  out["factors"] = d.factors();
  const DofAccount dof = dof_account(d, spec);
  out["dof"] = json{{"n", dof.n}, {"n_u", dof.n_u}, {"r", dof.r}, {"ell", dof.ell}, {"g", dof.g}, {"rank_x", dof.rank_x}};
  const ModelMatrices mm = expand_model(d, spec);
  const AliasSummary al = summarize_alias(alias_matrix(mm));
  out["alias"] = json{{"row_norms", to_json(al.row_norms)}, {"mean_abs", al.mean_abs}, {"max_abs", al.max_abs}};
  out["d_efficiency"] = d_efficiency(d);
  out["d_efficiency_uncentered"] = d_efficiency_uncentered(d);
  out["eci"] = eci_json(eci(d, spec, ep));
  if (dof.r >= 1) {
    out["gt_modified_d"] = gt_modified_d(d, a.alpha);
    out["gt_modified_a"] = gt_modified_a(d, a.alpha);
  }
  if (!mm.terms.empty()) {
    const RlofResult r = rlof_detail(d, spec, rp);
    out["rlof"] = json{{"value", r.value},         {"p2", r.p2},
                       {"rank_x2_adj", r.rank_x2_adj}, {"models", r.evaluated},
                       {"exhaustive", r.exhaustive}, {"argmin", terms_json(r.argmin, d.names)}};
  }
  emit(out, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

SearchConfig search_config_from(const json& j) {
  SearchConfig c;
  c.k = j.at("k").get<std::size_t>();
  c.n = j.at("n").get<std::size_t>();
  c.spec = ModelSpec::parse(j.value("model", std::string("2fi")), c.k);
  c.eci.alpha = j.value("alpha", 0.10);
  c.eci.tau2 = j.value("tau2", 20.0);
  c.eci.r_min = j.value("r_min", 0);
  c.eci.ell_min = j.value("ell_min", 0);
  c.restarts = j.value("restarts", std::size_t{2000});
  c.retain_threshold = j.value("S", 1.0);
  if (!j.contains("seed")) throw InvalidInput("construct config requires a seed");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_passes = j.value("max_passes", std::size_t{50});
  c.threads = j.value("threads", 0);
  if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<std::vector<double>>>();
  return c;
}

int run_construct(const std::string& config_path, const std::string& out_dir, int threads_flag) {
  const json cfg = read_json(config_path);
  SearchConfig c;
  try {
    c = search_config_from(cfg);
  } catch (const json::exception& e) {
    throw InvalidInput(config_path + ": " + e.what());
  }
  const int threads = threads_from(threads_flag);
  if (threads != 0) c.threads = threads;
  c.validate();
  const SearchResult r = search(c);
  fs::create_directories(out_dir);
  const json prov = provenance(cfg, c.seed);

  write_text((fs::path(out_dir) / "best.csv").string(), csv_header(prov) + format_design_csv(r.best));

  json pool;
  pool["provenance"] = prov;
  pool["model"] = c.spec.order_name();
  pool["alpha"] = c.eci.alpha;
  pool["tau2"] = c.eci.tau2;
  pool["r_min"] = c.eci.r_min;
  pool["ell_min"] = c.eci.ell_min;
  pool["S"] = c.retain_threshold;
  pool["entries"] = json::array();
  for (const auto& e : r.pool) {
    json entry = design_json(e.design);
    entry["eci_total"] = e.eci_total;
    pool["entries"].push_back(entry);
  }
  emit(pool, (fs::path(out_dir) / "pool.json").string());

  json trace;
  trace["provenance"] = prov;
  trace["best"] = json{{"restart", r.best_restart}, {"eci", eci_json(r.best_eval)}};
  trace["restarts"] = json::array();
  for (const auto& t : r.trace) {
    json s = json::array();
    for (double v : t.steps) s.push_back(v);
    trace["restarts"].push_back(json{{"start", t.start},
                                     {"final", t.final},
                                     {"passes", t.passes},
                                     {"pairing_ok", t.pairing_ok},
                                     {"monotone", t.monotone()},
                                     {"steps", s}});
  }
  emit(trace, (fs::path(out_dir) / "trace.json").string());
  std::cerr << "best ECI " << r.best_eval.total << " (restart " << r.best_restart << "), pool " << r.pool.size()
            << " designs\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_select(const std::string& pool_path, double s, const std::string& p2, const std::string& out) {
  const json pool = read_json(pool_path);
  std::vector<Design> designs;
  try {
    for (const auto& e : pool.at("entries")) designs.push_back(design_from_json(e));
  } catch (const json::exception& e) {
    throw InvalidInput(pool_path + ": " + e.what());
  }
  if (designs.empty()) throw NoDesignMeetsThreshold("pool is empty; rerun construct with more restarts or a larger S");
  const ModelSpec spec = ModelSpec::parse(pool.value("model", std::string("2fi")), designs.front().factors());
  EciParams ep;
  ep.alpha = pool.value("alpha", 0.10);
  ep.tau2 = pool.value("tau2", 20.0);
  ep.r_min = pool.value("r_min", 0);
  ep.ell_min = pool.value("ell_min", 0);
  RlofParams rp;
  rp.p2 = parse_p2(p2);
  const SelectionOutcome o = constrained_select(designs, spec, s, ep, rp);
  json cfg{{"command", "select"}, {"pool", pool.value("provenance", json::object()).value("config_hash", "")}, {"S", s}, {"p2", p2}};
  const json prov = provenance(cfg, std::nullopt);
  std::ostringstream head;
  head << csv_header(prov) << "# pool_index=" << o.index << " eci=" << format_number(o.eci_total)
       << " rlof=" << format_number(o.rlof) << " eligible=" << o.eligible << "\n";
  const std::string text = head.str() + format_design_csv(designs[o.index]);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string design;
  std::string responses;
  std::string model = "2fi";
  double alpha = 0.10;
  std::string method = "allsubsets";
  std::string heredity = "strong";
  bool full_x1 = false;
  bool no_pool = false;
  std::optional<std::size_t> column;
  std::string out;
};

json analysis_json(const AnalysisReport& r, const Design& d, const std::string& column) {
  json j;
  j["response"] = column;
  j["preselection"] = sigma_json(r.preselection);
  json s1 = json::array();
  for (std::size_t f = 0; f < r.stage1.factors.size(); ++f) {
    const FactorTest& t = r.stage1.factors[f];
    s1.push_back(json{{"factor", d.names[f]}, {"estimate", t.estimate}, {"se", t.se}, {"t", t.t}, {"p", t.p},
                      {"ci", json::array({t.ci_low, t.ci_high})}, {"active", t.active}});
  }
  j["stage1"] = json{{"intercept", r.stage1.beta_hat(0)}, {"g", r.stage1.g}, {"alpha", r.stage1.alpha},
                     {"factors", s1}, {"active", factors_json(r.stage1.active, d.names)}};
  j["pooled"] = json{{"sigma2", r.pooled.sigma2}, {"g_star", r.pooled.g_star}, {"ss_inactive", r.pooled.ss_inactive},
                     {"inactive", r.pooled.inactive}};
  const SelectionResult& sel = r.selection;
  json top = json::array();
  for (const auto& m : sel.top) top.push_back(json{{"terms", terms_json(m.terms, d.names)}, {"score", m.score}});
  json coef = json::object();
  for (std::size_t i = 0; i < sel.coefficient_names.size(); ++i)
    coef[sel.coefficient_names[i]] = sel.coefficients(static_cast<Eigen::Index>(i));
  j["selection"] = json{{"status", status_name(sel.status)},
                        {"terms", terms_json(sel.terms, d.names)},
                        {"mbic", std::isfinite(sel.mbic) ? json(sel.mbic) : json(nullptr)},
                        {"sigma2", sel.sigma2},
                        {"g_star", sel.g_star},
                        {"rank_x2_adj", sel.rank_x2_adj},
                        {"models_scored", sel.models_scored},
                        {"top", top},
                        {"coefficients", coef}};
  if (sel.overall) j["selection"]["overall_f"] = json{{"f", sel.overall->f}, {"p", sel.overall->p},
                                                      {"df1", sel.overall->df1}, {"df2", sel.overall->df2}};
  return j;
}

int run_analyze(const AnalyzeArgs& a) {
  const Design d = load_design_csv(a.design);
  const ResponseTable y = load_responses_csv(a.responses);
  if (static_cast<std::size_t>(y.values.rows()) != d.runs())
    throw DimensionMismatch("response file has " + std::to_string(y.values.rows()) + " rows, design has " +
                            std::to_string(d.runs()));
  const ModelSpec spec = ModelSpec::parse(a.model, d.factors());
  AnalysisOptions o;
  o.alpha = a.alpha;
  o.method = parse_method(a.method);
  o.heredity = parse_heredity(a.heredity);
  o.reduce_x1 = !a.full_x1;
  o.pool_inactive = !a.no_pool;
  json cfg{{"command", "analyze"}, {"design", fs::path(a.design).filename().string()},
           {"responses", fs::path(a.responses).filename().string()}, {"model", spec.order_name()}, {"alpha", a.alpha},
           {"method", method_name(o.method)}, {"heredity", heredity_name(o.heredity)}};
  json out;
  out["provenance"] = provenance(cfg, std::nullopt);
  out["results"] = json::array();
  for (Eigen::Index c = 0; c < y.values.cols(); ++c) {
    if (a.column && static_cast<std::size_t>(c) != *a.column) continue;
    const AnalysisReport r = analyze(y.values.col(c), d, spec, o);
    out["results"].push_back(analysis_json(r, d, y.names[static_cast<std::size_t>(c)]));
  }
  if (out["results"].empty()) throw InvalidInput("--column is out of range");
  emit(out, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

Design scenario_design(const json& j, const fs::path& base) {
  if (j.is_string()) return load_design_csv((base / j.get<std::string>()).string());
  if (j.contains("adsd")) {
    const auto v = j.at("adsd").get<std::vector<int>>();
    if (v.size() != 2) throw InvalidInput("adsd expects [k, f]");
    return adsd(v[0], v[1], j.value("drop_center", false));
  }
  if (j.contains("dsd")) return dsd(j.at("dsd").get<int>());
  throw InvalidInput("scenario design must be a CSV path or {\"adsd\": [k, f]} / {\"dsd\": k}");
}

AnalysisOptions analysis_from(const json& j) {
  AnalysisOptions o;
  o.alpha = j.value("alpha", 0.10);
  o.method = parse_method(j.value("method", std::string("allsubsets")));
  o.heredity = parse_heredity(j.value("heredity", std::string("strong")));
  o.reduce_x1 = j.value("reduce_x1", true);
  o.pool_inactive = j.value("pool_inactive", true);
  o.pool_passing = j.value("pool_passing", false);
  return o;
}

int run_simulate(const std::string& path, const std::string& out, int threads_flag) {
  const json j = read_json(path);
  const fs::path base = fs::path(path).parent_path();
  if (!j.contains("seed")) throw InvalidInput("scenario requires a seed");
  const int threads = threads_from(threads_flag);
  json result;
  try {
    const std::string kind = j.value("kind", std::string("random"));
    const Design d = scenario_design(j.at("design"), base);
    const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    result["provenance"] = provenance(j, seed);
    result["name"] = j.value("name", std::string());
    MetricsReport m;
    if (kind == "reactor") {
      ReactorSimOptions so;
      so.variant = j.value("variant", std::string("base")) == "plus_2fi" ? ReactorVariant::Plus2fi : ReactorVariant::Base;
      so.reps = j.value("reps", std::size_t{100});
      so.sigma = j.value("sigma", 3.331);
      so.seed = seed;
      so.threads = threads;
      so.analysis = analysis_from(j.value("analysis", json::object()));
      m = sim_reactor(d, so);
    } else if (kind == "random") {
      Scenario s;
      s.name = j.value("name", std::string());
      s.design = d;
      s.spec = ModelSpec::parse(j.value("model", std::string("quad")), d.factors());
      s.n_main = j.at("n_main").get<std::size_t>();
      s.n_2fi = j.value("n_2fi", std::size_t{0});
      s.n_quad = j.value("n_quad", std::size_t{0});
      s.offset_main = j.value("offset_main", 2.5);
      s.offset_second = j.value("offset_second", 2.5);
      s.sigma2 = j.value("sigma2", 1.0);
      s.reps = j.value("reps", std::size_t{100});
      s.seed = seed;
      s.threads = threads;
      s.analysis = analysis_from(j.value("analysis", json::object()));
      m = run_scenario(s);
    } else {
      throw InvalidInput("unknown scenario kind '" + kind + "'");
    }
    result["metrics"] = metrics_json(m);
    if (j.contains("expected")) {
      const double tol = j.value("tolerance", 0.15);
      json check = json::object();
      bool all = true;
      for (const auto& [key, want] : j.at("expected").items()) {
        const double got = result["metrics"].at(key).get<double>();
        const bool ok = std::abs(got - want.get<double>()) <= tol;
        all = all && ok;
        check[key] = json{{"expected", want}, {"got", got}, {"ok", ok}};
      }
      result["check"] = json{{"tolerance", tol}, {"all_ok", all}, {"rates", check}};
    }
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  emit(result, out);
  return 0;
}

// ---------------------------------------------------------------------------

int run_catalog(std::optional<int> dsd_k, const std::vector<int>& adsd_kf, bool drop_center, const std::string& out) {
  Design d;
  json cfg{{"command", "catalog"}};
  if (dsd_k) {
    d = dsd(*dsd_k);
    cfg["dsd"] = *dsd_k;
  } else if (adsd_kf.size() == 2) {
    d = adsd(adsd_kf[0], adsd_kf[1], drop_center);
    cfg["adsd"] = adsd_kf;
    cfg["drop_center"] = drop_center;
  } else {
    throw InvalidInput("catalog needs --dsd k or --adsd k f");
  }
  const std::string text = csv_header(provenance(cfg, std::nullopt)) + format_design_csv(d);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screening design construction, evaluation and analysis"};
  app.set_version_flag("--version", std::string("screenopt ") + SCREENOPT_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores; SCREENOPT_THREADS overrides)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "criteria report for a design CSV");
  evaluate->add_option("design", ev.design)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", ev.model, "me | 2fi | quad");
  evaluate->add_option("--alpha", ev.alpha);
  evaluate->add_option("--tau2", ev.tau2);
  evaluate->add_option("--r-min", ev.r_min);
  evaluate->add_option("--ell-min", ev.ell_min);
  evaluate->add_option("--p2", ev.p2, "fitted second-order terms for rLOF, or 'auto'");
  evaluate->add_option("--max-models", ev.max_models, "rLOF enumeration cap before sampling");
  evaluate->add_option("--out", ev.out);

  std::string config_path, out_dir = ".";
  auto* construct = app.add_subcommand("construct", "coordinate-exchange search from a JSON config");
  construct->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  construct->add_option("--out-dir", out_dir);

  std::string pool_path, p2 = "auto", select_out;
  double s = 1.0;
  auto* select = app.add_subcommand("select", "constrained rLOF choice from a pool");
  select->add_option("pool", pool_path)->required()->check(CLI::ExistingFile);
  select->add_option("--S", s, "ECI threshold");
  select->add_option("--p2", p2);
  select->add_option("--out", select_out);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "two-stage analysis of each response column");
  analyze_cmd->add_option("design", an.design)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("responses", an.responses)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--model", an.model);
  analyze_cmd->add_option("--alpha", an.alpha);
  analyze_cmd->add_option("--method", an.method, "allsubsets | guided | guided-extended");
  analyze_cmd->add_option("--heredity", an.heredity, "strong | weak | full");
  analyze_cmd->add_flag("--full-x1", an.full_x1, "keep every main effect in X1 during selection");
  analyze_cmd->add_flag("--no-pool", an.no_pool, "use the pre-selection sigma^2 without pooling");
  analyze_cmd->add_option("--column", an.column, "analyse only this 0-based response column");
  analyze_cmd->add_option("--out", an.out);

  std::string scenario_path, sim_out;
  auto* simulate = app.add_subcommand("simulate", "simulation study from a scenario JSON");
  simulate->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_out);

  std::optional<int> dsd_k;
  std::vector<int> adsd_kf;
  bool drop_center = false;
  std::string cat_out;
  auto* catalog = app.add_subcommand("catalog", "definitive screening designs");
  auto* dsd_opt = catalog->add_option("--dsd", dsd_k, "k factors");
  auto* adsd_opt = catalog->add_option("--adsd", adsd_kf, "k f")->expected(2);
  dsd_opt->excludes(adsd_opt);
  catalog->add_flag("--drop-center", drop_center);
  catalog->add_option("--out", cat_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*evaluate) return run_evaluate(ev);
    if (*construct) return run_construct(config_path, out_dir, threads);
    if (*select) return run_select(pool_path, s, p2, select_out);
    if (*analyze_cmd) return run_analyze(an);
    if (*simulate) return run_simulate(scenario_path, sim_out, threads);
    if (*catalog) return run_catalog(dsd_k, adsd_kf, drop_center, cat_out);
  } catch (const NoDesignMeetsThreshold& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NoErrorDegreesOfFreedom& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SingularInformation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
