// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gridsleuth/analytics.hpp"
#include "gridsleuth/cli.hpp"
#include "gridsleuth/energization.hpp"
#include "gridsleuth/metering.hpp"
#include "gridsleuth/planner.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gridsleuth;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

Verdict fig1_matrices() {
  Verdict v;
  const Topology t = gstest::ct8();
  const auto mi = incidence_matrix(t).entries;
  v.require(mi.rows() == 8 && mi.cols() == 7, "incidence shape");
  for (std::size_t c = 0; c < mi.cols(); ++c) {
    int sum = 0;
    for (std::size_t r = 0; r < mi.rows(); ++r) sum += mi(r, c);
    v.require(sum == 2, "column sum");
  }
  v.require(mi.nonzeros() == 14, "incidence total");
  const auto ma = adjacency_from_incidence(incidence_matrix(t), SwitchVector(7, true)).entries;
  for (std::size_t i = 0; i < 8; ++i) {
    v.require(ma(i, i) == 0, "diagonal");
    for (std::size_t j = 0; j < 8; ++j) v.require(ma(i, j) == ma(j, i), "symmetry");
  }
  v.require(ma.nonzeros() == 14, "adjacency nonzeros");
  if (v.pass) v.detail = "8x7 incidence, column sums 2, total 14; adjacency symmetric, zero diagonal, 14 nonzeros";
  return v;
}

Verdict scenario_vectors() {
  Verdict v;
  const Topology t = gstest::ct8();
  const auto mi = incidence_matrix(t);
  const auto vs = SourceVector::parse("10000001");
  const auto g = gstest::graph_of(t);
  std::vector<bool> seeds(8);
  for (std::size_t i = 0; i < 8; ++i) seeds[i] = vs[i];
  for (const char* vr : {"1110111", "1111001"}) {
    const auto sw = SwitchVector::parse(vr);
    const auto got = energized_nodes(mi, sw, vs);
    const auto ref = gstest::bfs_reach(g, gstest::closed_of(sw), seeds);
    for (std::size_t i = 0; i < 8; ++i) v.require(got[i] == ref[i], std::string("BFS disagreement for ") + vr);
  }
  v.require(energized_nodes(mi, SwitchVector::parse("1110111"), vs).str() == "11111111", "first scenario");
  v.require(energized_nodes(mi, SwitchVector::parse("1111001"), vs).str() == "11111011", "second scenario");
  if (v.pass) v.detail = "switches 1110111 -> energized 11111111; switches 1111001 -> 11111011 (node 6 dark)";
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict case_study() {
  Verdict v;
  const fs::path data = GRIDSLEUTH_DATA_DIR;
  const fs::path out = fs::temp_directory_path() / "gridsleuth_acceptance";
  fs::remove_all(out);
  std::string summary;
  for (int node : {5, 6, 7}) {
    const std::string name = "ct8_tamper" + std::to_string(node);
    std::ostringstream o, e;
    const int rc = run_cli({"localize", "run", "--check", "--scenario", (data / "scenarios" / (name + ".json")).string(),
                            "--out", out.string()},
                           o, e);
    v.require(rc == 0, name + " exit code " + std::to_string(rc));
    if (rc != 0) continue;
    const auto doc = nlohmann::json::parse(slurp(out / (name + ".json")));
    v.require(doc["alarms"] == nlohmann::json::array({"FRTU_2"}), name + " alarm");
    v.require(doc["final_suspects"] == nlohmann::json::array({node}), name + " final suspects");
    const auto& actions = doc["actions"];
    const std::vector<std::pair<std::string, std::string>> expected{{"close", "e4"}, {"open", "e5"}, {"open", "e6"}};
    v.require(actions.size() >= 3, name + " action count");
    for (std::size_t i = 0; i < 3 && i < actions.size(); ++i) {
      v.require(actions[i]["action"] == expected[i].first && actions[i]["edge"] == expected[i].second,
                name + " switching sequence");
    }
    int after = 0;
    for (const auto& c : doc["checks"]) after += c["after_step"].get<int>() >= 3;
    v.require(after <= 2, name + " checks after isolation");
    summary += " node " + std::to_string(node) + ": " + std::to_string(after) + " checks;";
  }
  fs::remove_all(out);
  if (v.pass) v.detail = "close e4, open e5, open e6;" + summary;
  return v;
}

Verdict suspect_set() {
  Verdict v;
  const Topology t = gstest::ct8();
  const auto vf = feeder_trip_energization(t, incidence_matrix(t), t.normal_state(), SourceVector::parse("10000001"),
                                           EdgeId(7));
  v.require(zero_set(vf) == gstest::nodes({5, 6, 7}), "zero set");
  if (v.pass) v.detail = "zero set after tripping e7 = {5, 6, 7}";
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  std::mt19937_64 rng(20240101);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = gstest::random_graph(rng, 32);
    std::vector<std::uint8_t> vb(g.edges.size()), sb(g.n);
    for (auto& b : vb) b = static_cast<std::uint8_t>(rng() & 1);
    for (auto& b : sb) b = static_cast<std::uint8_t>(rng() % 6 == 0);
    sb[rng() % g.n] = 1;
    const SwitchVector sw(vb);
    const SourceVector s(sb);
    const auto got = energized_nodes(gstest::incidence_of(g), sw, s);
    std::vector<bool> seeds(g.n);
    for (std::size_t i = 0; i < g.n; ++i) seeds[i] = s[i];
    const auto ref = gstest::bfs_reach(g, gstest::closed_of(sw), seeds);
    bool same = true;
    for (std::size_t i = 0; i < g.n; ++i) same = same && got[i] == ref[i];
    mismatches += !same;
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatching topologies");
  if (v.pass) v.detail = "1000 fuzzed topologies, 0 mismatches";
  return v;
}

// One feeder, one load node, 20 equal meters; i of them under-report by
// factor a = j/20, so the true fraction is f*(1-a) = i*(20-j)/400.
Verdict detection_threshold() {
  Verdict v;
  TopologySpec spec;
  spec.nodes = {{"S", NodeKind::SubstationSource, false}, {"L", NodeKind::Load, false}};
  spec.edges = {{"b", SwitchKind::FeederBreaker, "S", "L", "F"}};
  const Topology t = build_topology(spec);
  int wrong = 0;
  int boundary = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      std::vector<CustomerMeter> meters;
      for (int k = 0; k < 20; ++k) {
        CustomerMeter m{"m" + std::to_string(k), NodeId(2), 1.0, NoTamper{}, {}};
        if (k < i) m.tamper = ScaleTamper{j / 20.0};
        meters.push_back(m);
      }
      const auto iv = simulate_interval(t, t.normal_state(), meters, {0.0, 0.0}, 1);
      const bool alarm = detect(feeder_discrepancy(iv, "F"), 0.20);
      const bool expected = i * (20 - j) > 80;
      boundary += i * (20 - j) == 80;
      wrong += alarm != expected;
    }
  }
  v.require(wrong == 0, std::to_string(wrong) + " misclassified grid points");
  if (v.pass) {
    v.detail = "21x21 grid, 0 misclassifications (" + std::to_string(boundary) + " boundary points, none alarm)";
  }
  return v;
}

Verdict score_properties() {
  Verdict v;
  for (std::int64_t n = 0; n <= 100; ++n) {
    for (std::int64_t a = 0; a <= n; ++a) {
      const double s = anomaly_score(a, n).value;
      v.require(s >= 0.0 && s <= 1.0, "score bounds");
    }
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> qs(1 + rng() % 10);
    for (auto& q : qs) q = unit(rng);
    double none = 1.0;
    for (double q : qs) none *= 1.0 - q;
    const double p = alarm_probability(qs).value;
    worst = std::max(worst, std::abs(p - (1.0 - none)));

    auto perm = qs;
    std::shuffle(perm.begin(), perm.end(), rng);
    v.require(std::abs(alarm_probability(perm).value - p) < 1e-12, "permutation invariance");

    auto up = qs;
    const auto k = rng() % up.size();
    up[k] += unit(rng) * (1.0 - up[k]);
    v.require(alarm_probability(up).value >= p - 1e-15, "monotonicity");

    const std::vector<double> single{qs.front()};
    v.require(std::abs(alarm_probability(single).value - qs.front()) < 1e-15, "singleton");
  }
  v.require(worst < 1e-12, "closed form error");
  if (v.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "10000 lists, max |error| %.2e; bounds, monotone, permutation, singleton hold", worst);
    v.detail = buf;
  }
  return v;
}

Verdict constraint_preservation() {
  Verdict v;
  std::mt19937_64 rng(424242);
  int episodes = 0;
  int states = 0;
  int violations = 0;
  while (episodes < 500) {
    gstest::FeederOptions opt;
    opt.paths = episodes % 2 == 0;
    const Topology t = gstest::isolatable_feeders(rng, opt);
    const SwitchVector v0 = t.normal_state();
    NodeSet tampered;
    for (NodeId n : t.loads()) {
      if (rng() % 5 == 0) tampered.insert(n);
    }
    gstest::IdealOracle oracle(t, tampered);
    std::vector<EdgeId> alarming;
    for (const auto& f : t.frtus()) {
      if (oracle.alarm(v0, f.breaker)) alarming.push_back(f.breaker);
    }
    if (alarming.empty()) continue;
    const auto r = localize(t, v0, t.source_vector(), t.dg_vector(), alarming[rng() % alarming.size()], oracle, alarming);
    ++episodes;
    violations += static_cast<int>(r.constraint_violations.size());

    SwitchVector sw = v0;
    for (std::size_t i = 0; i < r.actions.size(); ++i) {
      const auto& a = r.actions[i];
      sw.set(a.edge, a.action == SwitchOp::Close);
      if (i + 1 < r.actions.size() && r.actions[i + 1].group == a.group) continue;
      ++states;
      const auto st = validate_operating_state(t, sw, false);
      violations += !st.unsupplied_loads.empty() || st.has_cycle();
    }
  }
  v.require(violations == 0, std::to_string(violations) + " violating states");
  if (v.pass) {
    v.detail = std::to_string(episodes) + " episodes, " + std::to_string(states) + " committed states, 0 violations";
  }
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "CT-8 incidence and adjacency matrices", fig1_matrices},
      {2, "CT-8 energization scenario vectors", scenario_vectors},
      {3, "CT-8 case study via localize run --check", case_study},
      {4, "feeder trip suspect set", suspect_set},
      {5, "energization equals BFS reachability", oracle_equivalence},
      {6, "detection threshold grid", detection_threshold},
      {7, "anomaly score and alarm probability laws", score_properties},
      {8, "constraint preservation over fuzzed episodes", constraint_preservation},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    all = all && v.pass;
    std::printf("%s criterion %d: %s -- %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
  }
  // No quantitative benchmark beyond the worked example exists to reproduce,
  // so this criterion stands on the eight above.
  std::printf("%s criterion 9: no published benchmark beyond the worked example -- %s\n", all ? "PASS" : "FAIL",
              all ? "rests on criteria 1-8, all passing" : "a criterion in 1-8 failed");
  return all ? 0 : 1;
}
