#include <algorithm>
#include <cmath>
#include <set>

#include "ias/errors.hpp"
#include "ias/experiments.hpp"

namespace ias {
namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::OracleLowdim, "oracle_lowdim"},
      {ExperimentKind::OracleHighdim, "oracle_highdim"},
      {ExperimentKind::FiniteSample, "finite_sample"},
      {ExperimentKind::MaxMi, "max_mi"},
      {ExperimentKind::Alpha0Sweep, "alpha0_sweep"},
      {ExperimentKind::WeakInterventions, "weak_interventions"},
      {ExperimentKind::CorrectionAblation, "correction_ablation"},
  };
  return names;
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names()) {
    if (k == kind) return name;
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), '-', '_');
  for (const auto& [k, name] : kind_names()) {
    if (name == normalized) return k;
  }
  throw ArgumentError("unknown experiment '" + text + "'");
}

bool is_ablation(ExperimentKind kind) {
  return kind == ExperimentKind::Alpha0Sweep || kind == ExperimentKind::WeakInterventions ||
         kind == ExperimentKind::CorrectionAblation;
}

std::vector<InterventionCount> InterventionSpec::expand(int d, EnvMode mode) const {
  switch (kind) {
    case Kind::Fixed:
      return {InterventionCount::fixed(low)};
    case Kind::Uniform:
      return {InterventionCount::uniform(low, high)};
    case Kind::Fraction:
      return {InterventionCount::uniform(1, std::max(1, static_cast<int>(std::floor(fraction * d + 1e-9))))};
    case Kind::All: {
      std::vector<InterventionCount> all;
      const int top = mode == EnvMode::NonExogenous ? d - 1 : d;
      for (int k = 1; k <= top; ++k) all.push_back(InterventionCount::fixed(k));
      return all;
    }
  }
  return {};
}

InterventionSpec InterventionSpec::parse(const nlohmann::json& j) {
  InterventionSpec spec;
  if (j.is_number_integer()) {
    spec.kind = Kind::Fixed;
    spec.low = spec.high = j.get<int>();
    if (spec.low < 1) throw ArgumentError("intervention count must be at least 1");
    return spec;
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    spec.kind = Kind::Uniform;
    spec.low = j[0].get<int>();
    spec.high = j[1].get<int>();
    if (spec.low < 1 || spec.high < spec.low) throw ArgumentError("intervention range must satisfy 1 <= lo <= hi");
    return spec;
  }
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "all") {
      spec.kind = Kind::All;
      return spec;
    }
    if (text.starts_with("upto:")) {
      try {
        std::size_t used = 0;
        spec.fraction = std::stod(text.substr(5), &used);
        if (used == text.size() - 5 && spec.fraction > 0.0 && spec.fraction <= 1.0) {
          spec.kind = Kind::Fraction;
          return spec;
        }
      } catch (const std::exception&) {
      }
    }
  }
  throw ArgumentError("intervention entries are an integer, [lo, hi], \"all\" or \"upto:<fraction>\", got " + j.dump());
}

nlohmann::json InterventionSpec::to_json() const {
  switch (kind) {
    case Kind::Fixed:
      return low;
    case Kind::Uniform:
      return nlohmann::json::array({low, high});
    case Kind::Fraction:
      return "upto:" + nlohmann::json(fraction).dump();
    case Kind::All:
      return "all";
  }
  return nullptr;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.strengths = {1.0};
  c.alpha0_values = {1e-6};
  c.corrections = {"auto"};
  c.n = {100, 1000, 10000, 100000};
  c.densities = {"sparse"};
  switch (kind) {
    case ExperimentKind::OracleLowdim:
      c.d = {4, 6, 8, 10, 12, 14, 16, 18, 20};
      c.densities = {"sparse", "dense"};
      c.interventions = {InterventionSpec{InterventionSpec::Kind::All}};
      break;
    case ExperimentKind::OracleHighdim:
      c.d = {100, 1000};
      c.interventions = {InterventionSpec{InterventionSpec::Kind::Fraction, 1, 1, 0.1}};
      c.graphs_per_cell = 1000;
      c.m_values = {1};
      break;
    case ExperimentKind::FiniteSample:
      c.d = {6};
      break;
    case ExperimentKind::Alpha0Sweep:
      c.d = {6};
      c.n = {100, 1000, 10000};
      c.alpha0_values = {0.05, 1e-6, 1e-12};
      break;
    case ExperimentKind::WeakInterventions:
      c.d = {6};
      c.strengths = {0.5};
      break;
    case ExperimentKind::CorrectionAblation:
      c.d = {6};
      c.corrections = {"heuristic_3pow", "full_2d"};
      break;
    case ExperimentKind::MaxMi:
      c.d = {6};
      c.densities = {"uniform:0.1:0.9"};
      c.interventions = {InterventionSpec{InterventionSpec::Kind::All}};
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, ExperimentKind fallback) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  static const std::set<std::string> known{
      "experiment", "seed",       "mode",    "out",   "d",       "densities",     "interventions",
      "graphs_per_cell", "m_values", "query_budget", "mb_limit", "n", "scms", "datasets_per_scm",
      "strengths",  "alpha0_values", "corrections", "alpha", "m",   "screening_k",   "runs",
      "batches",    "patience"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) throw ArgumentError("unknown config key '" + key + "'");
  }
  ExperimentKind kind = fallback;
  if (j.contains("experiment")) {
    if (!j.at("experiment").is_string()) throw ArgumentError("config key 'experiment' must be a string");
    kind = parse_experiment_kind(j.at("experiment").get<std::string>());
  }
  ExperimentConfig c = defaults(kind);
  read(j, "seed", c.seed);
  if (j.contains("mode")) {
    std::string mode;
    read(j, "mode", mode);
    if (mode == "exogenous") {
      c.mode = EnvMode::Exogenous;
    } else if (mode == "nonexogenous") {
      c.mode = EnvMode::NonExogenous;
    } else {
      throw ArgumentError("mode must be exogenous or nonexogenous");
    }
  }
  read(j, "out", c.out);
  read(j, "d", c.d);
  read(j, "densities", c.densities);
  if (j.contains("interventions")) {
    if (!j.at("interventions").is_array()) throw ArgumentError("config key 'interventions' must be a list");
    c.interventions.clear();
    for (const auto& entry : j.at("interventions")) c.interventions.push_back(InterventionSpec::parse(entry));
  }
  read(j, "graphs_per_cell", c.graphs_per_cell);
  read(j, "m_values", c.m_values);
  read(j, "query_budget", c.query_budget);
  read(j, "mb_limit", c.mb_limit);
  read(j, "n", c.n);
  read(j, "scms", c.scms);
  read(j, "datasets_per_scm", c.datasets_per_scm);
  read(j, "strengths", c.strengths);
  read(j, "alpha0_values", c.alpha0_values);
  read(j, "corrections", c.corrections);
  read(j, "alpha", c.alpha);
  if (j.contains("m") && !j.at("m").is_null()) {
    int m = 0;
    read(j, "m", m);
    c.m = m;
  }
  read(j, "screening_k", c.screening_k);
  read(j, "runs", c.runs);
  read(j, "batches", c.batches);
  if (j.contains("patience") && !j.at("patience").is_null()) {
    std::size_t p = 0;
    read(j, "patience", p);
    c.patience = p;
  }
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(kind);
  j["seed"] = seed;
  j["mode"] = mode == EnvMode::Exogenous ? "exogenous" : "nonexogenous";
  if (!out.empty()) j["out"] = out;
  j["d"] = d;
  j["densities"] = densities;
  j["interventions"] = nlohmann::json::array();
  for (const auto& spec : interventions) j["interventions"].push_back(spec.to_json());
  j["graphs_per_cell"] = graphs_per_cell;
  j["m_values"] = m_values;
  j["query_budget"] = query_budget;
  j["mb_limit"] = mb_limit;
  j["n"] = n;
  j["scms"] = scms;
  j["datasets_per_scm"] = datasets_per_scm;
  j["strengths"] = strengths;
  j["alpha0_values"] = alpha0_values;
  j["corrections"] = corrections;
  j["alpha"] = alpha;
  j["m"] = m ? nlohmann::json(*m) : nlohmann::json(nullptr);
  j["screening_k"] = screening_k;
  j["runs"] = runs;
  j["batches"] = batches;
  j["patience"] = patience ? nlohmann::json(*patience) : nlohmann::json(nullptr);
  return j;
}

void ExperimentConfig::validate() const {
  if (d.empty()) throw ArgumentError("config needs at least one d");
  for (int v : d) {
    if (v < 1) throw ArgumentError("every d must be at least 1");
  }
  if (densities.empty()) throw ArgumentError("config needs at least one density");
  for (const auto& text : densities) (void)Density::parse(text);
  for (int v : d) {
    for (const auto& spec : interventions) {
      const auto counts = spec.expand(v, mode);
      if (counts.empty()) throw ArgumentError("no admissible intervention count at d = " + std::to_string(v));
      for (const auto& count : counts) {
        const int cap = mode == EnvMode::NonExogenous ? v - 1 : v;
        if (count.high > cap) {
          throw ArgumentError("intervention count " + count.to_string() + " exceeds " + std::to_string(cap) +
                              " at d = " + std::to_string(v));
        }
      }
    }
  }
  if (mode == EnvMode::NonExogenous && kind != ExperimentKind::OracleLowdim && kind != ExperimentKind::OracleHighdim) {
    throw ArgumentError("non-exogenous mode is only available for the oracle studies");
  }
  switch (kind) {
    case ExperimentKind::OracleLowdim:
    case ExperimentKind::OracleHighdim:
      if (graphs_per_cell < 1) throw ArgumentError("graphs_per_cell must be at least 1");
      if (interventions.empty()) throw ArgumentError("oracle studies need an intervention grid");
      if (kind == ExperimentKind::OracleHighdim) {
        if (m_values.empty()) throw ArgumentError("oracle_highdim needs m_values");
        for (int v : m_values) {
          if (v < 0) throw ArgumentError("m_values must be non-negative");
        }
      }
      if (query_budget < 1) throw ArgumentError("query_budget must be positive");
      break;
    case ExperimentKind::MaxMi:
      if (runs < 1 || batches < 1) throw ArgumentError("max_mi needs runs >= 1 and batches >= 1");
      if (interventions.empty()) throw ArgumentError("max_mi needs an intervention prior");
      break;
    case ExperimentKind::FiniteSample:
    case ExperimentKind::Alpha0Sweep:
    case ExperimentKind::WeakInterventions:
    case ExperimentKind::CorrectionAblation: {
      if (scms < 1 || datasets_per_scm < 1) throw ArgumentError("scms and datasets_per_scm must be at least 1");
      if (n.empty() || strengths.empty() || alpha0_values.empty() || corrections.empty()) {
        throw ArgumentError("n, strengths, alpha0_values and corrections must be non-empty");
      }
      for (auto v : n) {
        if (v < 4) throw ArgumentError("every n must be at least 4");
      }
      for (const auto& spec : interventions) {
        if (spec.kind == InterventionSpec::Kind::All) throw ArgumentError("finite-sample studies take one intervention spec per run, not \"all\"");
      }
      if (interventions.size() > 1) throw ArgumentError("finite-sample studies take at most one intervention spec");
      for (int v : d) {
        for (double a0 : alpha0_values) {
          for (const auto& corr : corrections) {
            DecisionConfig dc;
            dc.alpha = alpha;
            dc.alpha0 = a0;
            dc.m = m ? std::optional<int>(std::min(*m, v)) : std::nullopt;
            apply_correction(dc, corr);
            dc.validate(v);
          }
        }
      }
      if (screening_k < 1) throw ArgumentError("screening_k must be at least 1");
      break;
    }
  }
}

}  // namespace ias
