#include "ias/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ias/csv.hpp"
#include "ias/errors.hpp"
#include "ias/estimator.hpp"
#include "ias/oracle.hpp"
#include "ias/scm.hpp"

namespace ias {

double jaccard(const VarSet& a, const VarSet& b) {
  const int together = (a | b).size();
  if (together == 0) return 0.0;
  return static_cast<double>((a & b).size()) / static_cast<double>(together);
}

std::uint64_t cell_key(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Rng::mix64(h);
}

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }
std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

// Runs body(i) for i in [0, count) on `jobs` threads; results land in index
// order. The first exception is rethrown after the loop.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, int jobs, F&& body) {
  std::vector<std::optional<T>> slots(count);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      slots[static_cast<std::size_t>(i)].emplace(body(static_cast<std::size_t>(i)));
    } catch (...) {
#pragma omp critical(ias_parallel_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(count);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

struct BlockResult {
  std::vector<ResultRecord> rows;
  std::size_t budget_exceeded = 0;
  std::size_t violations = 0;
  std::size_t estimator_failures = 0;
};

struct Block {
  std::vector<std::string> cell_ids;
  std::size_t rows_per_cell = 0;
  std::function<BlockResult(int)> run;
};

GraphSamplerConfig sampler(int d, const std::string& density, const InterventionCount& count, EnvMode mode) {
  GraphSamplerConfig g;
  g.d = d;
  g.density = Density::parse(density);
  g.n_interventions = count;
  g.mode = mode;
  g.validate();
  return g;
}

std::string mode_suffix(EnvMode mode) { return mode == EnvMode::NonExogenous ? ";mode=nonexogenous" : ""; }

std::string set_field(const VarSet& s) { return s.to_string(); }

// ---------------------------------------------------------------- oracle studies

std::vector<Block> oracle_lowdim_blocks(const ExperimentConfig& c) {
  std::vector<Block> blocks;
  for (int d : c.d) {
    for (const auto& density : c.densities) {
      for (const auto& spec : c.interventions) {
        for (const auto& count : spec.expand(d, c.mode)) {
          const std::string id = "d=" + std::to_string(d) + ";density=" + density + ";interventions=" +
                                 count.to_string() + mode_suffix(c.mode);
          Block b{{id}, c.graphs_per_cell, {}};
          b.run = [c, d, density, count, id](int jobs) {
            const GraphSamplerConfig g = sampler(d, density, count, c.mode);
            const Rng cell_rng = Rng(c.seed).split(cell_key(id));
            struct Out {
              ResultRecord row;
              bool budget = false;
              bool violation = false;
            };
            auto outs = parallel_map<Out>(c.graphs_per_cell, jobs, [&](std::size_t i) {
              Rng rng = cell_rng.split(i);
              const Dag dag = sample_dag(g, rng);
              EnumerationOptions opts;
              opts.budget = c.query_budget;
              Out out;
              std::string status = "ok";
              MinimalInvariantFamily family;
              try {
                family = enumerate_minimally_invariant(dag, opts);
              } catch (const BudgetExceeded& e) {
                family = e.partial();
                status = "budget";
                out.budget = true;
              }
              const VarSet s_icp = oracle_s_icp(dag);
              const VarSet s_as = family.union_all();
              const VarSet an = ancestors_of_response(dag);
              bool holds = s_as.is_subset_of(an);
              if (!out.budget) {
                holds = holds && s_icp.is_subset_of(s_as);
                const bool env_parent = dag.has_edge(dag.env(), dag.response());
                if (!env_parent) holds = holds && oracle_invariant(dag, s_as);
              }
              out.violation = !holds;
              const int n_int = static_cast<int>(dag.children(dag.env()).size());
              out.row = {id,
                         {num(d), density, num(n_int), num(i), num(s_icp.size()), num(s_as.size()), num(an.size()),
                          num(family.size()), flag(s_icp.is_strict_subset_of(s_as)), flag(holds), set_field(s_icp),
                          set_field(s_as), status}};
              return out;
            });
            BlockResult r;
            for (auto& o : outs) {
              r.rows.push_back(std::move(o.row));
              r.budget_exceeded += o.budget ? 1 : 0;
              r.violations += o.violation ? 1 : 0;
            }
            return r;
          };
          blocks.push_back(std::move(b));
        }
      }
    }
  }
  return blocks;
}

std::vector<Block> oracle_highdim_blocks(const ExperimentConfig& c) {
  std::vector<Block> blocks;
  for (int d : c.d) {
    for (const auto& density : c.densities) {
      for (const auto& spec : c.interventions) {
        for (const auto& count : spec.expand(d, c.mode)) {
          const std::string base = "d=" + std::to_string(d) + ";density=" + density + ";interventions=" +
                                   count.to_string() + mode_suffix(c.mode);
          Block b;
          b.rows_per_cell = c.graphs_per_cell;
          for (int m : c.m_values) b.cell_ids.push_back(base + ";m=" + std::to_string(m));
          b.run = [c, d, density, count, base, ids = b.cell_ids](int jobs) {
            const GraphSamplerConfig g = sampler(d, density, count, c.mode);
            const Rng cell_rng = Rng(c.seed).split(cell_key(base));
            const int max_m = *std::max_element(c.m_values.begin(), c.m_values.end());
            struct Out {
              std::vector<ResultRecord> rows;
              bool budget = false;
              std::size_t violations = 0;
            };
            auto outs = parallel_map<Out>(c.graphs_per_cell, jobs, [&](std::size_t i) {
              Rng rng = cell_rng.split(i);
              const Dag dag = sample_dag(g, rng);
              EnumerationOptions opts;
              opts.budget = c.query_budget;
              opts.max_size = max_m;
              Out out;
              MinimalInvariantFamily family;
              try {
                family = enumerate_minimally_invariant(dag, opts);
              } catch (const BudgetExceeded& e) {
                family = e.partial();
                out.budget = true;
              }
              const VarSet mb = oracle_markov_boundary(dag);
              const VarSet an = ancestors_of_response(dag);
              const bool mb_ok = static_cast<std::size_t>(mb.size()) <= std::min(c.mb_limit, std::size_t{25});
              const VarSet s_icp_mb = mb_ok ? oracle_s_icp_mb(dag) : VarSet{};
              const int n_int = static_cast<int>(dag.children(dag.env()).size());
              for (std::size_t k = 0; k < c.m_values.size(); ++k) {
                const int m = c.m_values[k];
                const VarSet s_as = family.union_up_to(m);
                const bool holds = s_as.is_subset_of(an) && (!mb_ok || s_icp_mb.is_subset_of(mb));
                out.violations += holds ? 0 : 1;
                const std::string status = out.budget ? "budget" : (mb_ok ? "ok" : "mb_too_large");
                out.rows.push_back({ids[k],
                                    {num(d), density, num(n_int), num(i), num(m), num(mb.size()), num(s_as.size()),
                                     mb_ok ? num(s_icp_mb.size()) : std::string{}, num(an.size()), flag(holds),
                                     status}});
              }
              return out;
            });
            BlockResult r;
            for (std::size_t k = 0; k < ids.size(); ++k) {
              for (auto& o : outs) r.rows.push_back(std::move(o.rows[k]));
            }
            for (const auto& o : outs) {
              r.budget_exceeded += o.budget ? 1 : 0;
              r.violations += o.violations;
            }
            return r;
          };
          blocks.push_back(std::move(b));
        }
      }
    }
  }
  return blocks;
}

// ---------------------------------------------------------------- finite sample

struct Variant {
  double alpha0;
  std::string correction;
  DecisionConfig decision;
};

struct ScmCase {
  LinearScm scm;
  VarSet an;
  VarSet s_as;
  VarSet s_icp;
  bool oracle_known = true;
};

bool full_search(const ExperimentConfig& c, int d) { return c.m ? *c.m >= d : d <= 20; }

std::vector<Block> finite_sample_blocks(const ExperimentConfig& c) {
  std::vector<Block> blocks;
  for (int d : c.d) {
    const int m = c.m ? std::min(*c.m, d) : (d <= 20 ? d : 1);
    std::vector<Variant> variants;
    for (double a0 : c.alpha0_values) {
      for (const auto& corr : c.corrections) {
        DecisionConfig dc;
        dc.alpha = c.alpha;
        dc.alpha0 = a0;
        dc.m = m;
        apply_correction(dc, corr);
        variants.push_back({a0, corr, dc});
      }
    }
    const InterventionCount count =
        c.interventions.empty() ? (d <= 20 ? InterventionCount::fixed(1) : InterventionCount::uniform(1, std::min(10, d)))
                                : c.interventions.front().expand(d).front();
    for (const auto& density : c.densities) {
      const std::string scm_label =
          "scm;d=" + std::to_string(d) + ";density=" + density + ";interventions=" + count.to_string();
      for (double strength : c.strengths) {
        for (std::size_t n : c.n) {
          const std::string base = "d=" + std::to_string(d) + ";density=" + density + ";interventions=" +
                                   count.to_string() + ";strength=" + num(strength) + ";n=" + std::to_string(n);
          Block b;
          b.rows_per_cell = c.scms * c.datasets_per_scm;
          for (const auto& v : variants) {
            b.cell_ids.push_back(base + ";alpha0=" + num(v.alpha0) + ";correction=" + v.correction);
          }
          b.run = [=, ids = b.cell_ids](int jobs) {
            const GraphSamplerConfig g = sampler(d, density, count, EnvMode::Exogenous);
            const Rng scm_rng = Rng(c.seed).split(cell_key(scm_label));
            const bool full = full_search(c, d);
            auto cases = parallel_map<ScmCase>(c.scms, jobs, [&](std::size_t s) {
              Rng rng = scm_rng.split(s);
              const Dag dag = sample_dag(g, rng);
              ScmCase sc{sample_scm(dag, strength, rng), ancestors_of_response(dag), {}, {}, true};
              EnumerationOptions opts;
              opts.budget = c.query_budget;
              try {
                sc.s_as = oracle_s_as(dag, full ? std::nullopt : std::optional<int>(m), opts);
              } catch (const BudgetExceeded&) {
                sc.oracle_known = false;
              }
              if (full) {
                sc.s_icp = oracle_s_icp(dag);
              } else if (static_cast<std::size_t>(oracle_markov_boundary(dag).size()) <= kMaxIcpCandidates) {
                sc.s_icp = oracle_s_icp_mb(dag);
              } else {
                sc.oracle_known = false;
              }
              return sc;
            });

            const Rng data_rng = Rng(c.seed).split(cell_key(base));
            const std::size_t total = c.scms * c.datasets_per_scm;
            struct Out {
              std::vector<ResultRecord> rows;
              std::size_t failures = 0;
              std::size_t violations = 0;
            };
            auto outs = parallel_map<Out>(total, jobs, [&](std::size_t task) {
              const std::size_t s = task / c.datasets_per_scm;
              const std::size_t j = task % c.datasets_per_scm;
              const ScmCase& sc = cases[s];
              Rng rng = data_rng.split(task);
              Out out;
              const std::string oracle_equal = sc.oracle_known ? flag(sc.s_as == sc.s_icp) : std::string{};
              const int n_int = static_cast<int>(sc.scm.intervention_targets.size());
              auto emit = [&](std::size_t v, const std::string& status, const VarSet* as_hat, const VarSet* icp_hat,
                              const SearchReport* report) {
                std::vector<std::string> values{num(d),          num(n),      num(strength), num(variants[v].alpha0),
                                                variants[v].correction, num(m), num(s), num(j), num(n_int),
                                                oracle_equal,    num(sc.an.size()), set_field(sc.s_as),
                                                set_field(sc.s_icp)};
                if (as_hat && icp_hat && report) {
                  const double ja = jaccard(*as_hat, sc.an);
                  const double ji = jaccard(*icp_hat, sc.an);
                  const bool ok = ja >= 0.0 && ja <= 1.0 && ji >= 0.0 && ji <= 1.0 &&
                                  (!as_hat->empty() || ja == 0.0) && (!icp_hat->empty() || ji == 0.0);
                  out.violations += ok ? 0 : 1;
                  values.insert(values.end(),
                                {set_field(*as_hat), set_field(*icp_hat), num(ja), num(ji),
                                 flag(as_hat->is_subset_of(sc.an)), flag(icp_hat->is_subset_of(sc.an)),
                                 flag(as_hat->empty()), flag(icp_hat->empty()), num(report->tested_count),
                                 num(report->failures.size()), status});
                } else {
                  values.insert(values.end(), {"", "", "", "", "", "", "", "", "", "", status});
                }
                out.rows.push_back({ids[v], std::move(values)});
              };
              try {
                const Dataset data = simulate(sc.scm, n, rng);
                const InvarianceTester tester(data);
                const PValueFn p = [&](const VarSet& set) { return tester.p_value(set); };
                const VarSet candidates = full ? VarSet::range(1, d) : screen_markov_boundary(data, std::min(c.screening_k, d));
                const VarSet icp_hat = icp_search(p, candidates, c.alpha);
                for (std::size_t v = 0; v < variants.size(); ++v) {
                  const SearchReport report = ias_search(p, d, variants[v].decision);
                  out.failures += report.failures.size();
                  emit(v, report.failures.empty() ? "ok" : "test_failures", &report.s_hat, &icp_hat, &report);
                }
              } catch (const NumericalError& e) {
                ++out.failures;
                for (std::size_t v = 0; v < variants.size(); ++v) emit(v, "simulation_failed", nullptr, nullptr, nullptr);
              }
              return out;
            });
            BlockResult r;
            for (std::size_t v = 0; v < ids.size(); ++v) {
              for (auto& o : outs) r.rows.push_back(std::move(o.rows[v]));
            }
            for (const auto& o : outs) {
              r.estimator_failures += o.failures;
              r.violations += o.violations;
            }
            return r;
          };
          blocks.push_back(std::move(b));
        }
      }
    }
  }
  return blocks;
}

// ---------------------------------------------------------------- max count

std::vector<Block> max_mi_blocks(const ExperimentConfig& c) {
  std::vector<Block> blocks;
  for (int d : c.d) {
    for (const auto& density : c.densities) {
      for (const auto& spec : c.interventions) {
        const InterventionCount count =
            spec.kind == InterventionSpec::Kind::All ? InterventionCount::uniform(1, d) : spec.expand(d).front();
        const std::string id = "d=" + std::to_string(d) + ";density=" + density + ";interventions=" + count.to_string();
        Block b{{id}, c.runs, {}};
        b.run = [c, d, density, count, id](int jobs) {
          const GraphSamplerConfig g = sampler(d, density, count, EnvMode::Exogenous);
          const Rng cell_rng = Rng(c.seed).split(cell_key(id));
          const double bound = std::pow(3.0, (d + 2) / 3);
          auto rows = parallel_map<ResultRecord>(c.runs, jobs, [&](std::size_t run) {
            Rng rng = cell_rng.split(run);
            const MaxCountResult res = simulate_max_mi_count(g, c.batches, c.patience, rng);
            return ResultRecord{id,
                                {num(d), density, count.to_string(), num(run), num(c.batches), num(res.draws),
                                 num(res.max_count), num(bound), flag(static_cast<double>(res.max_count) > bound),
                                 flag(res.stopped_early)}};
          });
          return BlockResult{std::move(rows), 0, 0, 0};
        };
        blocks.push_back(std::move(b));
      }
    }
  }
  return blocks;
}

std::vector<Block> build_blocks(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::OracleLowdim:
      return oracle_lowdim_blocks(c);
    case ExperimentKind::OracleHighdim:
      return oracle_highdim_blocks(c);
    case ExperimentKind::MaxMi:
      return max_mi_blocks(c);
    case ExperimentKind::FiniteSample:
    case ExperimentKind::Alpha0Sweep:
    case ExperimentKind::WeakInterventions:
    case ExperimentKind::CorrectionAblation:
      return finite_sample_blocks(c);
  }
  return {};
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += '\n';
  return line;
}

std::string record_line(const ResultRecord& r) {
  std::vector<std::string> fields{r.cell_id};
  fields.insert(fields.end(), r.values.begin(), r.values.end());
  return csv_line(fields);
}

std::string header_line(ExperimentKind kind) {
  std::vector<std::string> fields{"cell_id"};
  const auto rest = experiment_header(kind);
  fields.insert(fields.end(), rest.begin(), rest.end());
  return csv_line(fields);
}

void accumulate(RunOutcome& outcome, const BlockResult& r) {
  ++outcome.cells_run;
  outcome.rows += r.rows.size();
  outcome.budget_exceeded += r.budget_exceeded;
  outcome.violations += r.violations;
  outcome.estimator_failures += r.estimator_failures;
}

}  // namespace

std::vector<std::string> experiment_header(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::OracleLowdim:
      return {"d",         "density",   "n_interventions", "graph",          "size_s_icp",
              "size_s_as", "size_an_y", "mi_count",        "icp_strict_subset_as", "inclusions_hold",
              "s_icp",     "s_as",      "status"};
    case ExperimentKind::OracleHighdim:
      return {"d", "density", "n_interventions", "graph", "m", "size_mb", "size_s_as_m", "size_s_icp_mb",
              "size_an_y", "inclusions_hold", "status"};
    case ExperimentKind::MaxMi:
      return {"d", "density", "interventions", "run", "batches", "draws", "max_count", "bound_3pow", "exceeds_bound",
              "stopped_early"};
    case ExperimentKind::FiniteSample:
    case ExperimentKind::Alpha0Sweep:
    case ExperimentKind::WeakInterventions:
    case ExperimentKind::CorrectionAblation:
      return {"d",          "n",           "strength",      "alpha0",       "correction",    "m",
              "scm",        "dataset",     "n_interventions", "oracle_equal", "size_an_y",     "s_as_oracle",
              "s_icp_oracle", "s_as_hat",  "s_icp_hat",     "jaccard_as",   "jaccard_icp",   "as_subset_an",
              "icp_subset_an", "as_empty", "icp_empty",     "tests",        "failures",      "status"};
  }
  return {};
}

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& out, int jobs) {
  config.validate();
  RunOutcome outcome;
  out << header_line(config.kind);
  for (const auto& block : build_blocks(config)) {
    const BlockResult r = block.run(jobs);
    for (const auto& row : r.rows) out << record_line(row);
    out.flush();
    accumulate(outcome, r);
  }
  return outcome;
}

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  if (options.out_path.empty()) throw ArgumentError("an output path is required");
  const std::string header = header_line(config.kind);
  const auto blocks = build_blocks(config);

  // Rows already on disk, grouped by cell, when resuming.
  std::map<std::string, std::vector<std::vector<std::string>>> existing;
  if (options.resume && std::filesystem::exists(options.out_path)) {
    std::ifstream in(options.out_path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (reader.next(fields)) {
      if (csv_line(fields) != header) throw ArgumentError("cannot resume: " + options.out_path + " has a different header");
      const std::size_t width = fields.size();
      while (reader.next(fields)) {
        if (fields.size() != width) break;  // torn final line
        existing[fields.front()].push_back(fields);
      }
    }
  }

  std::ofstream out(options.out_path, std::ios::trunc);
  if (!out) throw ResourceError("cannot write " + options.out_path);
  std::ofstream timing(options.out_path + ".timing.csv", options.resume ? std::ios::app : std::ios::trunc);
  if (!options.resume || timing.tellp() == 0) timing << "cell_id,rows,seconds\n";
  out << header;
  out.flush();

  RunOutcome outcome;
  for (const auto& block : blocks) {
    const bool complete = std::all_of(block.cell_ids.begin(), block.cell_ids.end(), [&](const std::string& id) {
      const auto it = existing.find(id);
      return it != existing.end() && it->second.size() == block.rows_per_cell;
    });
    if (complete) {
      for (const auto& id : block.cell_ids) {
        for (const auto& fields : existing[id]) out << csv_line(fields);
      }
      out.flush();
      ++outcome.cells_resumed;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    const BlockResult r = block.run(options.jobs);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& row : r.rows) out << record_line(row);
    out.flush();
    for (const auto& id : block.cell_ids) {
      timing << csv_line({id, std::to_string(r.rows.size() / block.cell_ids.size()), format_double(seconds)});
    }
    timing.flush();
    accumulate(outcome, r);
    if (options.on_cell) options.on_cell(block.cell_ids.front(), r.rows.size());
  }
  return outcome;
}

}  // namespace ias
