// ias-kit: oracle queries, estimation on CSV data, and the simulation studies.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ias/errors.hpp"
#include "ias/estimator.hpp"
#include "ias/experiments.hpp"
#include "ias/graph_io.hpp"
#include "ias/oracle.hpp"
#include "ias/random_graphs.hpp"
#include "ias/scm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct StudyArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  bool resume = false;
  std::string kind;
};

void add_study_options(CLI::App* cmd, StudyArgs& args) {
  cmd->add_option("--config", args.config, "JSON config file (defaults are used when omitted)");
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--out", args.out, "Output CSV path");
  cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--resume", args.resume, "Keep completed cells of an existing output file");
}

int run_study(ias::ExperimentKind fallback, const StudyArgs& args) {
  ias::ExperimentConfig config;
  try {
    nlohmann::json j = nlohmann::json::object();
    if (!args.config.empty()) {
      std::ifstream in(args.config);
      if (!in) throw ias::ArgumentError("cannot open config " + args.config);
      j = nlohmann::json::parse(in);
    }
    if (!args.kind.empty()) {
      const auto kind = ias::parse_experiment_kind(args.kind);
      if (j.contains("experiment") && ias::parse_experiment_kind(j["experiment"].get<std::string>()) != kind) {
        throw ias::ArgumentError("--kind disagrees with the config's experiment");
      }
      j["experiment"] = ias::to_string(kind);
    }
    config = ias::ExperimentConfig::from_json(j, fallback);
    if (fallback == ias::ExperimentKind::Alpha0Sweep) {
      if (!ias::is_ablation(config.kind)) throw ias::ArgumentError("ablate runs alpha0_sweep, weak_interventions or correction_ablation");
    } else if (config.kind != fallback) {
      throw ias::ArgumentError("config experiment '" + ias::to_string(config.kind) + "' does not match the subcommand");
    }
    if (args.seed) config.seed = *args.seed;
    if (!args.out.empty()) config.out = args.out;
    if (config.out.empty()) throw ias::ArgumentError("no output path: pass --out or set \"out\" in the config");
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ias::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  ias::RunOptions options;
  options.out_path = config.out;
  options.jobs = args.jobs;
  options.resume = args.resume;
  options.on_cell = [](const std::string& cell, std::size_t rows) { std::cerr << cell << ": " << rows << " rows\n"; };
  const ias::RunOutcome outcome = ias::run_experiment(config, options);
  std::cerr << "cells run " << outcome.cells_run << ", resumed " << outcome.cells_resumed << ", rows " << outcome.rows
            << '\n';
  if (outcome.violations) std::cerr << "warning: " << outcome.violations << " rows failed their inclusion checks\n";
  if (outcome.estimator_failures) std::cerr << "note: " << outcome.estimator_failures << " invariance tests failed numerically\n";
  if (outcome.partial()) {
    std::cerr << "partial: " << outcome.budget_exceeded << " enumerations hit the query budget\n";
    return kExitPartial;
  }
  return kExitOk;
}

ias::Dag load_graph(const std::string& path, const std::string& mode) {
  const auto env_mode = mode == "nonexogenous" ? ias::EnvMode::NonExogenous : ias::EnvMode::Exogenous;
  if (path.ends_with(".csv")) return ias::read_adjacency_csv_file(path, env_mode);
  return ias::read_edge_list_file(path);
}

ias::InterventionCount parse_count(const std::string& text) {
  const auto dash = text.find('-');
  try {
    if (dash == std::string::npos) return ias::InterventionCount::fixed(std::stoi(text));
    return ias::InterventionCount::uniform(std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1)));
  } catch (const std::logic_error&) {
    throw ias::ArgumentError("intervention count must be <n> or <lo>-<hi>, got '" + text + "'");
  }
}

nlohmann::json set_json(const ias::VarSet& s) { return s.to_vector(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant ancestry search toolkit"};
  app.require_subcommand(1);

  StudyArgs lowdim, highdim, finite, maxmi, ablate;
  add_study_options(app.add_subcommand("oracle-lowdim", "Oracle S_ICP vs S_AS over random graphs"), lowdim);
  add_study_options(app.add_subcommand("oracle-highdim", "Oracle S_AS^m vs S_ICP^MB on large sparse graphs"), highdim);
  add_study_options(app.add_subcommand("finite-sample", "Estimators on simulated linear Gaussian data"), finite);
  add_study_options(app.add_subcommand("max-mi", "Largest number of minimally invariant sets"), maxmi);
  auto* ablate_cmd = app.add_subcommand("ablate", "alpha0 sweep, weak interventions or correction ablation");
  add_study_options(ablate_cmd, ablate);
  ablate_cmd->add_option("--kind", ablate.kind, "alpha0_sweep | weak_interventions | correction_ablation");

  std::string sum_in, sum_out, sum_by;
  auto* sum_cmd = app.add_subcommand("summarize", "Per-cell means, medians and Wilson intervals");
  sum_cmd->add_option("input", sum_in, "Result CSV")->required();
  sum_cmd->add_option("--out", sum_out, "Summary CSV (stdout when omitted)");
  sum_cmd->add_option("--by", sum_by, "Average within this column first, e.g. scm");

  std::string data_path, correction = "auto";
  double alpha = 0.05, alpha0 = 1e-6;
  std::optional<double> alpha1;
  std::optional<int> max_size;
  bool with_icp = false;
  auto* run_cmd = app.add_subcommand("run", "Estimate ancestors of Y from a dataset CSV");
  run_cmd->add_option("--data", data_path, "CSV with header E,X1,...,Xd,Y")->required();
  run_cmd->add_option("--alpha", alpha);
  run_cmd->add_option("--alpha0", alpha0);
  run_cmd->add_option("--alpha1", alpha1);
  run_cmd->add_option("--correction", correction, "auto | full_2d | heuristic_3pow | restricted | <C>");
  run_cmd->add_option("--m", max_size, "Largest set size to test");
  run_cmd->add_flag("--icp", with_icp, "Also report the ICP intersection over all predictors (d <= 25)");

  int g_d = 6;
  std::string g_density = "sparse", g_count = "1", g_mode = "exogenous", g_format = "edges";
  std::uint64_t g_seed = 1;
  auto* sample_cmd = app.add_subcommand("sample-graph", "Draw a random graph");
  sample_cmd->add_option("--d", g_d)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--density", g_density, "sparse | dense | p=<x> | uniform:<lo>:<hi>");
  sample_cmd->add_option("--n-interventions", g_count, "<n> or <lo>-<hi>");
  sample_cmd->add_option("--seed", g_seed);
  sample_cmd->add_option("--mode", g_mode)->check(CLI::IsMember({"exogenous", "nonexogenous"}));
  sample_cmd->add_option("--format", g_format)->check(CLI::IsMember({"edges", "csv"}));

  std::string e_graph, e_backend = "auto", e_mode = "exogenous";
  std::optional<int> e_max;
  std::uint64_t e_budget = ias::kDefaultQueryBudget;
  auto* enum_cmd = app.add_subcommand("enumerate", "List minimally invariant sets as JSON lines");
  enum_cmd->add_option("--graph", e_graph, "Edge list, or adjacency CSV (*.csv)")->required();
  enum_cmd->add_option("--max-size", e_max);
  enum_cmd->add_option("--backend", e_backend)->check(CLI::IsMember({"auto", "brute-force", "separators"}));
  enum_cmd->add_option("--budget", e_budget);
  enum_cmd->add_option("--mode", e_mode, "Mode for adjacency CSV input")->check(CLI::IsMember({"exogenous", "nonexogenous"}));

  std::string o_graph, o_mode = "exogenous";
  auto* oracle_cmd = app.add_subcommand("oracle", "Oracle sets of a graph as JSON");
  oracle_cmd->add_option("--graph", o_graph)->required();
  oracle_cmd->add_option("--mode", o_mode)->check(CLI::IsMember({"exogenous", "nonexogenous"}));

  std::string s_graph, s_scm, s_out, s_scm_out;
  std::size_t s_n = 1000;
  double s_strength = 1.0;
  std::uint64_t s_seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset from a graph or an SCM JSON");
  auto* graph_opt = sim_cmd->add_option("--graph", s_graph, "Edge list; coefficients are sampled");
  sim_cmd->add_option("--scm", s_scm, "SCM JSON")->excludes(graph_opt);
  sim_cmd->add_option("--n", s_n)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--strength", s_strength, "Intervention strength when sampling from --graph");
  sim_cmd->add_option("--seed", s_seed);
  sim_cmd->add_option("--out", s_out, "Dataset CSV (stdout when omitted)");
  sim_cmd->add_option("--save-scm", s_scm_out, "Write the SCM used as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("oracle-lowdim")) return run_study(ias::ExperimentKind::OracleLowdim, lowdim);
    if (app.got_subcommand("oracle-highdim")) return run_study(ias::ExperimentKind::OracleHighdim, highdim);
    if (app.got_subcommand("finite-sample")) return run_study(ias::ExperimentKind::FiniteSample, finite);
    if (app.got_subcommand("max-mi")) return run_study(ias::ExperimentKind::MaxMi, maxmi);
    if (app.got_subcommand("ablate")) return run_study(ias::ExperimentKind::Alpha0Sweep, ablate);

    if (app.got_subcommand("summarize")) {
      std::ifstream in(sum_in);
      if (!in) throw ias::ArgumentError("cannot open " + sum_in);
      const auto by = sum_by.empty() ? std::nullopt : std::optional<std::string>(sum_by);
      if (sum_out.empty()) {
        ias::summarize(in, std::cout, by);
      } else {
        std::ofstream out(sum_out);
        ias::summarize(in, out, by);
      }
      return kExitOk;
    }

    if (app.got_subcommand("run")) {
      const ias::Dataset data = ias::read_dataset_csv_file(data_path);
      ias::DecisionConfig config;
      config.alpha = alpha;
      config.alpha0 = alpha0;
      config.alpha1 = alpha1;
      config.m = max_size;
      ias::apply_correction(config, correction);
      const ias::InvarianceTester tester(data, ias::ExecutionPolicy::Parallel);
      const ias::PValueFn p = [&](const ias::VarSet& s) { return tester.p_value(s); };
      nlohmann::json report = ias::ias_search(p, data.d(), config).to_json();
      report["n"] = data.n();
      if (with_icp) report["s_icp_hat"] = set_json(ias::icp_search(p, ias::VarSet::range(1, data.d()), alpha));
      std::cout << report.dump(2) << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("sample-graph")) {
      ias::GraphSamplerConfig cfg;
      cfg.d = g_d;
      cfg.density = ias::Density::parse(g_density);
      cfg.n_interventions = parse_count(g_count);
      cfg.mode = g_mode == "nonexogenous" ? ias::EnvMode::NonExogenous : ias::EnvMode::Exogenous;
      cfg.rng_seed = g_seed;
      const ias::Dag dag = ias::sample_dag(cfg);
      if (g_format == "csv") {
        ias::write_adjacency_csv(std::cout, dag);
      } else {
        ias::write_edge_list(std::cout, dag);
      }
      return kExitOk;
    }

    if (app.got_subcommand("enumerate")) {
      const ias::Dag dag = load_graph(e_graph, e_mode);
      ias::EnumerationOptions opts;
      opts.max_size = e_max;
      opts.budget = e_budget;
      opts.backend = e_backend == "brute-force"  ? ias::EnumerationBackend::BruteForce
                     : e_backend == "separators" ? ias::EnumerationBackend::Separators
                                                 : ias::EnumerationBackend::Auto;
      ias::MinimalInvariantFamily family;
      int code = kExitOk;
      try {
        family = ias::enumerate_minimally_invariant(dag, opts);
      } catch (const ias::BudgetExceeded& e) {
        family = e.partial();
        std::cerr << e.what() << '\n';
        code = kExitPartial;
      }
      for (const auto& s : family.sets) std::cout << nlohmann::json{{"set", set_json(s)}, {"size", s.size()}}.dump() << '\n';
      return code;
    }

    if (app.got_subcommand("oracle")) {
      const ias::Dag dag = load_graph(o_graph, o_mode);
      nlohmann::json j;
      j["d"] = dag.d();
      j["an_y"] = set_json(ias::ancestors_of_response(dag));
      j["s_icp"] = set_json(ias::oracle_s_icp(dag));
      j["s_as"] = set_json(ias::oracle_s_as(dag));
      const ias::VarSet mb = ias::oracle_markov_boundary(dag);
      j["markov_boundary"] = set_json(mb);
      if (static_cast<std::size_t>(mb.size()) <= 25) j["s_icp_mb"] = set_json(ias::oracle_s_icp_mb(dag));
      j["minimally_invariant"] = nlohmann::json::array();
      for (const auto& s : ias::enumerate_minimally_invariant(dag).sets) j["minimally_invariant"].push_back(set_json(s));
      std::cout << j.dump(2) << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("simulate")) {
      ias::Rng rng(s_seed);
      ias::LinearScm scm = [&] {
        if (!s_scm.empty()) {
          std::ifstream in(s_scm);
          if (!in) throw ias::ArgumentError("cannot open " + s_scm);
          return ias::scm_from_json(nlohmann::json::parse(in));
        }
        if (s_graph.empty()) throw ias::ArgumentError("simulate needs --graph or --scm");
        ias::Rng coef_rng = rng.split(0);
        return ias::sample_scm(ias::read_edge_list_file(s_graph), s_strength, coef_rng);
      }();
      if (!s_scm_out.empty()) {
        std::ofstream out(s_scm_out);
        out << ias::scm_to_json(scm).dump(2) << '\n';
      }
      ias::Rng data_rng = rng.split(1);
      const ias::Dataset data = ias::simulate(scm, s_n, data_rng);
      if (s_out.empty()) {
        ias::write_dataset_csv(std::cout, data);
      } else {
        std::ofstream out(s_out);
        ias::write_dataset_csv(out, data);
      }
      return kExitOk;
    }
  } catch (const ias::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ias::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
