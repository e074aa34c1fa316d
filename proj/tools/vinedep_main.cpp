// vinedep: vine-copula dependence analysis for CSV cohorts.
//
// Subcommands: curate, fit, rank, clusters, sample, export-tau.
// Exit codes: 0 ok, 2 usage, 3 data error, 4 numeric failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vinedep/analysis.hpp"
#include "vinedep/dependence.hpp"
#include "vinedep/errors.hpp"
#include "vinedep/ingest.hpp"
#include "vinedep/json_io.hpp"
#include "vinedep/margins.hpp"
#include "vinedep/parallel.hpp"
#include "vinedep/sample.hpp"
#include "vinedep/structure.hpp"
#include "vinedep/vinefit.hpp"

using namespace vinedep;

namespace {

int verbosity() {
  const char* env = std::getenv("VINEDEP_LOG");
  if (!env) return 1;
  std::string v(env);
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << "vinedep: " << msg << "\n";
}

struct CommonOpts {
  std::string input;
  std::string schema;
  uint64_t seed = 0;
  int threads = 0;
  double row_threshold = 0.05;
  std::string tie_policy = "jitter";
  std::string criterion = "aic";
  std::string families;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input) {
  if (needs_input) {
    cmd->add_option("--input", o.input, "input CSV file")->required();
    cmd->add_option("--schema", o.schema, "schema JSON file")->required();
  }
  cmd->add_option("--seed", o.seed, "seed for jitter and sampling (default 0)");
  cmd->add_option("--threads", o.threads, "worker threads (default: all cores)");
}

void add_fit_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--criterion", o.criterion, "family selection criterion: aic|bic")
      ->check(CLI::IsMember({"aic", "bic"}));
  cmd->add_option("--families", o.families,
                  "comma-separated candidate families "
                  "(default gaussian,frank,clayton,student_t; add gumbel to extend)");
  cmd->add_option("--tie-policy", o.tie_policy, "tie handling: jitter|average_rank")
      ->check(CLI::IsMember({"jitter", "average_rank"}));
  cmd->add_option("--row-missing-threshold", o.row_threshold,
                  "drop rows with missing fraction above this (default 0.05)");
}

FitSettings make_settings(const CommonOpts& o, int trunc_level) {
  FitSettings s;
  s.criterion = criterion_from_string(o.criterion);
  if (!o.families.empty()) s.families = families_from_string(o.families);
  s.trunc_level = trunc_level;
  return s;
}

// Load, curate per the bound/missingness/imputation protocol.
DataTable load_curated(const CommonOpts& o, CurationLog& log) {
  auto schema = load_schema(o.schema);
  DataTable raw = load_table(o.input, schema);
  return curate(raw, o.row_threshold, log);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

std::vector<ConditionSpec> parse_conditions(const std::vector<std::string>& raw) {
  std::vector<ConditionSpec> out;
  for (const auto& s : raw) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DataError("condition must look like variable=value: " + s);
    }
    ConditionSpec c;
    c.variable = s.substr(0, eq);
    try {
      c.value = std::stod(s.substr(eq + 1));
    } catch (...) {
      throw DataError("condition value is not numeric: " + s);
    }
    out.push_back(std::move(c));
  }
  return out;
}

int cmd_curate(const CommonOpts& o, const std::string& out_csv, const std::string& out_log) {
  CurationLog log;
  DataTable curated = load_curated(o, log);
  emit(out_csv, to_csv(curated));
  if (!out_log.empty()) write_text_file(out_log, canonical_dump(log.to_json()));
  log_info("curated " + std::to_string(curated.n_rows()) + " rows, dropped " +
           std::to_string(log.rows_dropped));
  return 0;
}

int cmd_fit(const CommonOpts& o, const std::string& vine, const std::string& order_csv,
            int trunc_level, const std::string& out_model, const std::string& dot_dir) {
  CurationLog log;
  DataTable curated = load_curated(o, log);
  VineKind kind = vine_kind_from_string(vine);
  FitSettings settings = make_settings(o, trunc_level);
  TiePolicy tie = tie_policy_from_string(o.tie_policy);

  FittedVine fv;
  if (kind == VineKind::dvine && !order_csv.empty()) {
    std::vector<int> order;
    size_t pos = 0;
    while (pos <= order_csv.size()) {
      auto comma = order_csv.find(',', pos);
      std::string tok = order_csv.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      int idx = curated.index_of(tok);
      if (idx < 0) throw DataError("order variable not in table: " + tok);
      order.push_back(idx);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    PseudoObs u = make_pseudo_obs(curated, tie, o.seed);
    fv = fit_vine(u, kind, settings, &order);
    fv.marginals = fit_all_marginals(curated);
    fv.tie_policy = tie;
    fv.seed = o.seed;
  } else {
    fv = fit_vine_table(curated, kind, settings, tie, o.seed);
  }
  fv.curation_log = log.to_json();
  emit(out_model, canonical_dump(model_to_json(fv)));
  if (!dot_dir.empty()) {
    for (size_t m = 0; m < fv.structure.trees.size(); ++m) {
      write_text_file(dot_dir + "/tree" + std::to_string(m + 1) + ".dot",
                      fv.structure.to_dot(m));
    }
  }
  log_info("fitted " + vine + " on " + std::to_string(fv.n) + " rows, loglik " +
           std::to_string(fv.loglik));
  return 0;
}

int cmd_rank(const CommonOpts& o, int levels, const std::vector<std::string>& conditions,
             bool text, bool tie_sensitivity, const std::string& out) {
  CurationLog log;
  DataTable curated = load_curated(o, log);

  AnalysisOptions opt;
  opt.levels = levels;
  opt.seed = o.seed;
  opt.tie_policy = tie_policy_from_string(o.tie_policy);
  opt.fit = make_settings(o, 0);

  CentralityRanking ranking;
  auto conds = parse_conditions(conditions);
  if (conds.empty()) {
    PseudoObs u = make_pseudo_obs(curated, opt.tie_policy, opt.seed);
    int d = static_cast<int>(u.d());
    int lv = levels <= 0 || levels > d - 1 ? d - 1 : levels;
    ranking = rank_central_variables(u, lv, opt.fit);
  } else {
    ranking = conditioned_ranking(curated, conds, opt);
  }

  json j = ranking.to_json();
  if (tie_sensitivity) {
    // Re-run under the other tie policy so rank stability is visible.
    AnalysisOptions alt = opt;
    alt.tie_policy = opt.tie_policy == TiePolicy::jitter ? TiePolicy::average_rank
                                                         : TiePolicy::jitter;
    CentralityRanking other;
    if (conds.empty()) {
      PseudoObs u = make_pseudo_obs(curated, alt.tie_policy, alt.seed);
      int d = static_cast<int>(u.d());
      int lv = levels <= 0 || levels > d - 1 ? d - 1 : levels;
      other = rank_central_variables(u, lv, alt.fit);
    } else {
      other = conditioned_ranking(curated, conds, alt);
    }
    j["tie_sensitivity"] = {{"tie_policy", to_string(alt.tie_policy)},
                            {"rankings", other.to_json()["rankings"]}};
  }
  emit(out, text ? ranking.to_text() : canonical_dump(j));
  return 0;
}

int cmd_clusters(const CommonOpts& o, const std::string& model_path, int min_degree,
                 const std::string& out, const std::string& dot_dir) {
  VineStructure structure;
  if (!model_path.empty()) {
    FittedVine fv = model_from_json(read_json_file(model_path));
    structure = std::move(fv.structure);
  } else {
    if (o.input.empty() || o.schema.empty()) {
      throw DataError("clusters needs --model or --input with --schema");
    }
    CurationLog log;
    DataTable curated = load_curated(o, log);
    PseudoObs u = make_pseudo_obs(curated, tie_policy_from_string(o.tie_policy), o.seed);
    structure = build_rvine(u, make_settings(o, 0));
  }
  ClusterReport report = extract_clusters(structure, min_degree);
  emit(out, canonical_dump(report.to_json()));
  if (!dot_dir.empty()) {
    for (const auto& hub : report.hubs) {
      write_text_file(dot_dir + "/cluster_" + hub.center + ".dot", cluster_dot(hub));
    }
    if (!structure.trees.empty()) {
      write_text_file(dot_dir + "/tree1.dot", structure.to_dot(0));
    }
    log_info("wrote " + std::to_string(report.hubs.size()) + " cluster DOT files");
  }
  return 0;
}

int cmd_sample(const CommonOpts& o, const std::string& model_path, size_t n,
               const std::string& scale, const std::string& out) {
  FittedVine fv = model_from_json(read_json_file(model_path));
  bool data_scale = scale == "data";
  SampleBatch batch =
      data_scale ? sample_data_scale(fv, n, o.seed) : sample_uniform(fv, n, o.seed);
  emit(out, batch_to_csv(batch, fv.structure.names, data_scale));
  return 0;
}

int cmd_export_tau(const CommonOpts& o, const std::string& format, const std::string& out) {
  CurationLog log;
  DataTable curated = load_curated(o, log);
  PseudoObs u = make_pseudo_obs(curated, tie_policy_from_string(o.tie_policy), o.seed);
  TauMatrix m = tau_matrix(u);
  emit(out, format == "csv" ? m.to_csv() : canonical_dump(m.to_json()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vine-copula dependence analysis for tabular CSV data"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* curate_cmd = app.add_subcommand(
      "curate",
      "apply plausibility bounds, row-missingness filter, median imputation "
      "(missing codes: empty, NA, NaN, null, any case)");
  std::string out_csv, out_log;
  add_common(curate_cmd, o, true);
  curate_cmd->add_option("--row-missing-threshold", o.row_threshold,
                         "drop rows with missing fraction above this (default 0.05)");
  curate_cmd->add_option("--out", out_csv, "curated CSV (default stdout)");
  curate_cmd->add_option("--log", out_log, "curation log JSON path");

  auto* fit_cmd = app.add_subcommand("fit", "fit a vine copula model");
  std::string vine = "rvine", order_csv, out_model, fit_dot_dir;
  int trunc_level = 0;
  add_common(fit_cmd, o, true);
  add_fit_opts(fit_cmd, o);
  fit_cmd->add_option("--vine", vine, "structure kind: rvine|cvine|dvine")
      ->check(CLI::IsMember({"rvine", "cvine", "dvine"}));
  fit_cmd->add_option("--order", order_csv, "D-vine path order (comma-separated names)");
  fit_cmd->add_option("--trunc-level", trunc_level,
                      "fit independence above this tree level (0 = off)");
  fit_cmd->add_option("--out", out_model, "model JSON (default stdout)");
  fit_cmd->add_option("--dot-dir", fit_dot_dir, "directory for per-tree DOT renderings");

  auto* rank_cmd = app.add_subcommand(
      "rank", "rank variables by C-vine conditional-dependence centrality");
  int levels = 0;
  std::vector<std::string> conditions;
  bool text = false, tie_sensitivity = false;
  std::string rank_out;
  add_common(rank_cmd, o, true);
  add_fit_opts(rank_cmd, o);
  rank_cmd->add_option("--levels", levels, "tree levels to report (default all)");
  rank_cmd->add_option("--condition", conditions,
                       "cohort filter variable=value (repeatable; variable is dropped)");
  rank_cmd->add_flag("--text", text, "human-readable table instead of JSON");
  rank_cmd->add_flag("--tie-sensitivity", tie_sensitivity,
                     "include a re-run under the other tie policy");
  rank_cmd->add_option("--out", rank_out, "report path (default stdout)");

  auto* clusters_cmd = app.add_subcommand(
      "clusters", "hub-centered dependence clusters of the first R-vine tree");
  std::string model_path, clusters_out, dot_dir;
  int min_degree = 3;
  add_common(clusters_cmd, o, false);
  add_fit_opts(clusters_cmd, o);
  clusters_cmd->add_option("--input", o.input, "input CSV file");
  clusters_cmd->add_option("--schema", o.schema, "schema JSON file");
  clusters_cmd->add_option("--model", model_path, "fitted model JSON (skips refit)");
  clusters_cmd->add_option("--min-degree", min_degree, "hub degree threshold (default 3)");
  clusters_cmd->add_option("--out", clusters_out, "report path (default stdout)");
  clusters_cmd->add_option("--dot-dir", dot_dir, "directory for per-hub DOT files");

  auto* sample_cmd = app.add_subcommand("sample", "draw synthetic rows from a fitted model");
  std::string sample_model, scale = "uniform", sample_out;
  size_t n_samples = 0;
  add_common(sample_cmd, o, false);
  sample_cmd->add_option("--model", sample_model, "fitted model JSON")->required();
  sample_cmd->add_option("--n", n_samples, "number of rows")->required();
  sample_cmd->add_option("--scale", scale, "uniform|data")
      ->check(CLI::IsMember({"uniform", "data"}));
  sample_cmd->add_option("--out", sample_out, "CSV path (default stdout)");

  auto* tau_cmd = app.add_subcommand("export-tau", "pairwise Kendall tau matrix");
  std::string tau_format = "json", tau_out;
  add_common(tau_cmd, o, true);
  tau_cmd->add_option("--tie-policy", o.tie_policy, "tie handling: jitter|average_rank")
      ->check(CLI::IsMember({"jitter", "average_rank"}));
  tau_cmd->add_option("--row-missing-threshold", o.row_threshold,
                      "drop rows with missing fraction above this (default 0.05)");
  tau_cmd->add_option("--format", tau_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  tau_cmd->add_option("--out", tau_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  set_thread_count(o.threads);

  try {
    if (app.got_subcommand(curate_cmd)) return cmd_curate(o, out_csv, out_log);
    if (app.got_subcommand(fit_cmd)) {
      return cmd_fit(o, vine, order_csv, trunc_level, out_model, fit_dot_dir);
    }
    if (app.got_subcommand(rank_cmd)) {
      return cmd_rank(o, levels, conditions, text, tie_sensitivity, rank_out);
    }
    if (app.got_subcommand(clusters_cmd)) {
      return cmd_clusters(o, model_path, min_degree, clusters_out, dot_dir);
    }
    if (app.got_subcommand(sample_cmd)) {
      return cmd_sample(o, sample_model, n_samples, scale, sample_out);
    }
    if (app.got_subcommand(tau_cmd)) return cmd_export_tau(o, tau_format, tau_out);
  } catch (const DataError& e) {
    std::cerr << "vinedep: data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "vinedep: numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "vinedep: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
