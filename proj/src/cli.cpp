#include "gridsleuth/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gridsleuth/analytics.hpp"
#include "gridsleuth/energization.hpp"
#include "gridsleuth/errors.hpp"
#include "gridsleuth/planner.hpp"
#include "gridsleuth/report_io.hpp"
#include "gridsleuth/scenario_io.hpp"
#include "gridsleuth/simulation_oracle.hpp"
#include "gridsleuth/topology_io.hpp"

namespace gridsleuth {

namespace fs = std::filesystem;

namespace {

int code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
      return exit_code::kParse;
    case ErrorCode::InfeasiblePlan:
    case ErrorCode::InfeasibleIsolation:
      return exit_code::kInfeasiblePlan;
    case ErrorCode::OracleInconsistent:
      return exit_code::kOracleInconsistent;
    default:
      return exit_code::kInvariant;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("GRIDSLEUTH_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw Error(ErrorCode::ParseError, std::string("GRIDSLEUTH_SEED '") + raw + "' is not an integer");
  return v;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

struct RunConfig {
  std::string topology;
  std::vector<std::string> scenarios;
  std::string scenario_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string out;
  std::string vr;
  std::string vs;
  bool check = false;
  std::optional<int> intervals;
  std::string history;
  std::string node;
  std::optional<std::size_t> history_intervals;
  double deviation_threshold = kDefaultDeviationThreshold;
};

void apply_overrides(Scenario& sc, const RunConfig& cfg) {
  if (auto s = env_seed()) sc.seed = *s;
  if (cfg.seed) sc.seed = *cfg.seed;
  if (cfg.threshold) {
    if (!(*cfg.threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "threshold must be positive");
    sc.threshold = *cfg.threshold;
  }
  if (cfg.intervals) sc.intervals = *cfg.intervals;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const TopologySpec spec = read_topology_spec(cfg.topology);
  const Topology t = build_topology(spec);
  out << "nodes " << t.node_count() << ", edges " << t.edge_count() << ", frtus " << t.frtus().size() << "\n";
  out << "ids unique: ok\nendpoints resolved: ok\nno self loops: ok\nbreakers at sources: ok\n";
  out << "normal state radial, one source per feeder: ok\n";
  const auto state = validate_operating_state(t, t.normal_state(), false);
  if (!state.ok()) throw Error(ErrorCode::NonRadialNormalState, "normal state leaves loads unsupplied");
  out << "normal state supplies every load: ok\nvalid\n";
  return exit_code::kOk;
}

SwitchVector switches_arg(const Topology& t, const std::string& text) {
  SwitchVector v = SwitchVector::parse(text);
  if (v.size() != t.edge_count()) {
    throw Error(ErrorCode::DimensionMismatch, "switch string has " + std::to_string(v.size()) + " entries, expected " +
                                                  std::to_string(t.edge_count()));
  }
  return v;
}

int cmd_matrices(const RunConfig& cfg, std::ostream& out) {
  const Topology t = load_topology(cfg.topology);
  const SwitchVector v = cfg.vr.empty() ? SwitchVector(t.edge_count(), true) : switches_arg(t, cfg.vr);
  const IncidenceMatrix mi = incidence_matrix(t);
  const AdjacencyMatrix ma = adjacency_from_incidence(mi, v);
  const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);

  std::ostringstream dense_i, dense_a, sparse_i, sparse_a;
  write_dense_csv(dense_i, mi.entries, node_labels(t), edge_labels(t));
  write_dense_csv(dense_a, ma.entries, node_labels(t), node_labels(t));
  write_sparse_csv(sparse_i, mi.entries);
  write_sparse_csv(sparse_a, ma.entries);
  write_file(dir / "incidence.csv", dense_i.str());
  write_file(dir / "adjacency.csv", dense_a.str());
  write_file(dir / "incidence_sparse.csv", sparse_i.str());
  write_file(dir / "adjacency_sparse.csv", sparse_a.str());

  out << "incidence " << mi.entries.rows() << "x" << mi.entries.cols() << ", " << mi.entries.nonzeros() << " entries\n";
  out << "adjacency " << ma.entries.rows() << "x" << ma.entries.cols() << ", " << ma.entries.nonzeros()
      << " entries (switches " << v.str() << ")\n";
  return exit_code::kOk;
}

int cmd_energize(const RunConfig& cfg, std::ostream& out) {
  const Topology t = load_topology(cfg.topology);
  const SwitchVector v = switches_arg(t, cfg.vr);
  const SourceVector s = cfg.vs.empty() ? t.source_vector() : SourceVector::parse(cfg.vs);
  out << energized_nodes(incidence_matrix(t), v, s).str() << "\n";
  return exit_code::kOk;
}

int cmd_sim(const RunConfig& cfg, std::ostream& out) {
  if (cfg.scenarios.size() != 1) throw Error(ErrorCode::InvalidSpec, "sim run takes exactly one --scenario");
  Scenario sc = load_scenario(cfg.scenarios.front());
  apply_overrides(sc, cfg);
  const SwitchVector v = sc.operating_state();
  std::ostringstream csv;
  write_interval_header(csv);
  for (int i = 0; i < sc.intervals; ++i) {
    write_interval_rows(csv, sc.topology, simulate_interval(sc.topology, v, sc.meters, sc.sim, sc.seed, i));
  }
  if (cfg.out.empty()) {
    out << csv.str();
  } else {
    write_file(cfg.out, csv.str());
    out << "wrote " << sc.intervals << " interval(s) for " << sc.meters.size() << " meter(s) to " << cfg.out << "\n";
  }
  return exit_code::kOk;
}

std::vector<fs::path> scenario_paths(const RunConfig& cfg) {
  std::vector<fs::path> paths(cfg.scenarios.begin(), cfg.scenarios.end());
  if (!cfg.scenario_dir.empty()) {
    if (!fs::is_directory(cfg.scenario_dir)) throw Error(ErrorCode::ParseError, "no directory " + cfg.scenario_dir);
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(cfg.scenario_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  if (paths.empty()) throw Error(ErrorCode::InvalidSpec, "no scenario given");
  return paths;
}

ScenarioOutcome localize_scenario(const Scenario& sc) {
  const Topology& t = sc.topology;
  const SwitchVector v0 = sc.operating_state();
  SimulationOracle oracle(t, sc.meters, sc.sim, sc.seed, sc.threshold);

  ScenarioOutcome outcome;
  outcome.scenario = sc.name;
  outcome.alarms = oracle.alarms(v0);
  for (EdgeId alarm : outcome.alarms) {
    // Each episode starts from the operating state the alarm was raised in.
    outcome.episodes.push_back(localize(t, v0, t.source_vector(), t.dg_vector(), alarm, oracle, outcome.alarms));
    const auto& ep = outcome.episodes.back();
    outcome.final_suspects.insert(ep.final_suspects.begin(), ep.final_suspects.end());
    outcome.unresolved.insert(ep.unresolved.begin(), ep.unresolved.end());
  }
  for (NodeId n : outcome.final_suspects) outcome.unresolved.erase(n);
  return outcome;
}

int cmd_localize(const RunConfig& cfg, std::ostream& out) {
  int mismatches = 0;
  for (const fs::path& path : scenario_paths(cfg)) {
    Scenario sc = load_scenario(path);
    apply_overrides(sc, cfg);
    const ScenarioOutcome outcome = localize_scenario(sc);
    const std::string log = step_log(sc.topology, outcome);
    if (cfg.out.empty()) {
      out << log;
    } else {
      write_file(fs::path(cfg.out) / (sc.name + ".json"), report_json(sc.topology, outcome));
      write_file(fs::path(cfg.out) / (sc.name + ".log"), log);
    }
    if (cfg.check) {
      const NodeSet expected = sc.ground_truth.value_or(NodeSet{});
      const bool match = expected == outcome.final_suspects;
      if (!match) ++mismatches;
      out << "check " << sc.name << ": " << (match ? "ok" : "MISMATCH") << " expected "
          << format_nodes(sc.topology, expected) << " got " << format_nodes(sc.topology, outcome.final_suspects) << "\n";
    }
  }
  return mismatches == 0 ? exit_code::kOk : exit_code::kCheckFailed;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  std::ifstream in(cfg.history);
  if (!in) throw Error(ErrorCode::ParseError, "missing history file " + cfg.history);
  const auto records = read_history_csv(in);

  int interval_count = 0;
  for (const auto& r : records) interval_count = std::max(interval_count, r.interval + 1);
  ScoringOptions options;
  options.history_intervals = cfg.history_intervals.value_or(static_cast<std::size_t>(interval_count / 2));
  options.deviation_threshold = cfg.deviation_threshold;
  if (!(options.deviation_threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "threshold must be positive");

  // Scoring works within one node, so its numeric id is only a grouping key.
  const NodeId key(1);
  const auto histories = histories_for_node(records, cfg.node, key);
  std::vector<MeterScore> ranked;
  if (!histories.empty()) {
    if (options.history_intervals == 0) throw Error(ErrorCode::EmptyHistory, "no archive intervals");
    ranked = score_node(key, histories, options);
  }
  std::ostringstream csv;
  write_scores_csv(csv, cfg.node, ranked);
  if (cfg.out.empty()) {
    out << csv.str();
  } else {
    write_file(cfg.out, csv.str());
  }
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tampered smart meter localization on radial distribution feeders", "gridsleuth"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* topo = app.add_subcommand("topo", "Inspect a network description")->require_subcommand(1);
  auto* validate = topo->add_subcommand("validate", "Check the structural rules");
  validate->add_option("topology", cfg.topology, "Topology JSON")->required();
  auto* matrices = topo->add_subcommand("matrices", "Write incidence and adjacency matrices");
  matrices->add_option("topology", cfg.topology, "Topology JSON")->required();
  matrices->add_option("--vr", cfg.vr, "Switch states, one digit per edge (default: all closed)");
  matrices->add_option("--out", cfg.out, "Output directory");
  auto* energize_cmd = topo->add_subcommand("energize", "Print the energized node vector");
  energize_cmd->add_option("topology", cfg.topology, "Topology JSON")->required();
  energize_cmd->add_option("--vr", cfg.vr, "Switch states, one digit per edge")->required();
  energize_cmd->add_option("--vs", cfg.vs, "Source flags, one digit per node (default: from topology)");

  auto* sim = app.add_subcommand("sim", "Simulate metering")->require_subcommand(1);
  auto* sim_run = sim->add_subcommand("run", "Write interval readings as CSV");
  sim_run->add_option("--scenario", cfg.scenarios, "Scenario JSON")->required();
  sim_run->add_option("--intervals", cfg.intervals, "Number of intervals (overrides scenario)");
  sim_run->add_option("--seed", cfg.seed, "Seed (overrides scenario and GRIDSLEUTH_SEED)");
  sim_run->add_option("--out", cfg.out, "Output CSV (default: stdout)");

  auto* loc = app.add_subcommand("localize", "Localize tampered nodes")->require_subcommand(1);
  auto* loc_run = loc->add_subcommand("run", "Run localization episodes for scenarios");
  loc_run->add_option("--scenario", cfg.scenarios, "Scenario JSON (repeatable)");
  loc_run->add_option("--scenario-dir", cfg.scenario_dir, "Directory of scenario JSON files");
  loc_run->add_option("--seed", cfg.seed, "Seed (overrides scenario and GRIDSLEUTH_SEED)");
  loc_run->add_option("--threshold", cfg.threshold, "Detection threshold (overrides scenario)");
  loc_run->add_option("--out", cfg.out, "Directory for JSON reports and step logs");
  loc_run->add_flag("--check", cfg.check, "Compare final suspects with the scenario ground truth");

  auto* score = app.add_subcommand("score", "Rank the meters of one node");
  score->add_option("--history", cfg.history, "Interval CSV")->required();
  score->add_option("--node", cfg.node, "Node label")->required();
  score->add_option("--history-intervals", cfg.history_intervals, "Leading intervals used as archive");
  score->add_option("--threshold", cfg.deviation_threshold, "Relative deviation from the archive median");
  score->add_option("--out", cfg.out, "Output CSV (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_code::kOk : exit_code::kParse;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (matrices->parsed()) return cmd_matrices(cfg, out);
    if (energize_cmd->parsed()) return cmd_energize(cfg, out);
    if (sim_run->parsed()) return cmd_sim(cfg, out);
    if (loc_run->parsed()) return cmd_localize(cfg, out);
    if (score->parsed()) return cmd_score(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return score->parsed() && e.code() == ErrorCode::EmptyHistory ? exit_code::kParse : code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kParse;
  }
  return exit_code::kParse;
}

}  // namespace gridsleuth
