#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gridsleuth/energization.hpp"
#include "gridsleuth/errors.hpp"
#include "gridsleuth/planner.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gridsleuth;
using gstest::E;
using gstest::N;
using gstest::nodes;

std::vector<SwitchingAction> isolation_actions() {
  return {{E(4), SwitchOp::Close, 1, 1}, {E(5), SwitchOp::Open, 2, 1}, {E(6), SwitchOp::Open, 3, 1}};
}

LocalizationReport run_ct8(const Topology& t, NodeSet tampered, int alarm = 7) {
  gstest::IdealOracle oracle(t, std::move(tampered));
  return localize(t, t.normal_state(), t.source_vector(), t.dg_vector(), E(alarm), oracle);
}

TEST(Isolation, Ct8) {
  const Topology t = gstest::ct8();
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  EXPECT_EQ(plan.actions, isolation_actions());
  EXPECT_EQ(plan.state.str(), "1111001");
  ASSERT_EQ(plan.islands.size(), 1u);
  EXPECT_EQ(plan.islands[0].nodes, nodes({6}));
  EXPECT_EQ(plan.islands[0].reconnect, E(6));
}

TEST(Isolation, NoDgLeavesStateAlone) {
  auto spec = gstest::ct8_spec();
  spec.nodes[5].dg = false;
  const Topology t = build_topology(spec);
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  EXPECT_TRUE(plan.actions.empty());
  EXPECT_TRUE(plan.islands.empty());
  EXPECT_EQ(plan.state, t.normal_state());
}

TEST(Isolation, LeafDgNeedsOneOpen) {
  auto spec = gstest::ct8_spec();
  spec.nodes[5].dg = false;
  spec.nodes[3].dg = true;  // node 4, behind e3
  const Topology t = build_topology(spec);
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  ASSERT_EQ(plan.actions.size(), 1u);
  EXPECT_EQ(plan.actions[0].edge, E(3));
  EXPECT_EQ(plan.actions[0].action, SwitchOp::Open);
  ASSERT_EQ(plan.islands.size(), 1u);
  EXPECT_EQ(plan.islands[0].nodes, nodes({4}));
}

TEST(Isolation, Errors) {
  const Topology t = gstest::ct8();
  try {
    isolate_dg_islands(t, t.normal_state(), DgVector::parse("00100000"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
  try {
    isolate_dg_islands(t, SwitchVector(6, true), t.dg_vector());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Isolation, InfeasibleWithoutTie) {
  TopologySpec s;
  s.nodes = {{"1", NodeKind::SubstationSource, false}, {"2", NodeKind::Load, true}, {"3", NodeKind::Load, false}};
  s.edges = {{"b", SwitchKind::FeederBreaker, "1", "2", {}}, {"s", SwitchKind::Sectionalizer, "2", "3", {}}};
  const Topology t = build_topology(s);
  try {
    isolate_dg_islands(t, t.normal_state(), t.dg_vector());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleIsolation);
  }
  gstest::IdealOracle oracle(t, nodes({3}));
  try {
    localize(t, t.normal_state(), t.source_vector(), t.dg_vector(), E(1), oracle);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePlan);
  }
}

TEST(Restoration, Ct8TamperAtDgNode) {
  const Topology t = gstest::ct8();
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  gstest::IdealOracle oracle(t, nodes({6}));
  const auto frag = sequential_restoration(t, plan.state, plan.islands, E(7), oracle);
  EXPECT_FALSE(frag.skipped);
  ASSERT_EQ(frag.checks.size(), 2u);
  EXPECT_FALSE(frag.checks[0].alarm);
  EXPECT_EQ(frag.checks[1].breaker, E(7));
  EXPECT_TRUE(frag.checks[1].alarm);
  EXPECT_EQ(frag.culprit, std::optional<std::size_t>(0));
  EXPECT_EQ(frag.suspects, nodes({6}));
  ASSERT_EQ(frag.actions.size(), 1u);
  EXPECT_EQ(frag.actions[0].edge, E(6));
  EXPECT_EQ(frag.actions[0].action, SwitchOp::Close);
}

TEST(Restoration, Ct8TamperAtNode7IsSkipped) {
  const Topology t = gstest::ct8();
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  gstest::IdealOracle oracle(t, nodes({7}));
  const auto frag = sequential_restoration(t, plan.state, plan.islands, E(7), oracle);
  EXPECT_TRUE(frag.skipped);
  EXPECT_TRUE(frag.actions.empty());
  EXPECT_EQ(frag.state, plan.state);
}

TEST(Restoration, NoIslands) {
  const Topology t = gstest::ct8();
  gstest::IdealOracle oracle(t, nodes({}));
  const auto frag = sequential_restoration(t, t.normal_state(), {}, E(7), oracle);
  EXPECT_TRUE(frag.actions.empty());
  EXPECT_FALSE(frag.culprit.has_value());
}

TEST(Restoration, InconsistentOracle) {
  const Topology t = gstest::ct8();
  const auto plan = isolate_dg_islands(t, t.normal_state(), t.dg_vector());
  gstest::IdealOracle silent(t, nodes({}));
  try {
    sequential_restoration(t, plan.state, plan.islands, E(7), silent);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OracleInconsistent);
  }
}

TEST(Localize, Ct8SingleTampers) {
  const Topology t = gstest::ct8();
  for (int node : {5, 6, 7}) {
    SCOPED_TRACE(node);
    const auto r = run_ct8(t, nodes({node}));
    EXPECT_EQ(r.final_suspects, nodes({node}));
    EXPECT_FALSE(r.irreducible);
    ASSERT_GE(r.actions.size(), 3u);
    EXPECT_EQ(std::vector<SwitchingAction>(r.actions.begin(), r.actions.begin() + 3), isolation_actions());
    EXPECT_LE(r.checks.size(), 2u);
    EXPECT_EQ(r.suspect_history.front().nodes, nodes({5, 6, 7}));
    EXPECT_TRUE(r.constraint_violations.empty());
  }
}

TEST(Localize, Ct8Node5Walk) {
  const auto r = run_ct8(gstest::ct8(), nodes({5}));
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].breaker, E(7));
  EXPECT_FALSE(r.checks[0].alarm);
  EXPECT_EQ(r.checks[1].breaker, E(1));
  EXPECT_TRUE(r.checks[1].alarm);
  EXPECT_EQ(r.checks[1].zone, nodes({2, 3, 4, 5}));
  EXPECT_TRUE(r.cleared_by_isolation);
  EXPECT_EQ(r.final_state.str(), "1111001");
}

TEST(Localize, Ct8Node7Walk) {
  const auto r = run_ct8(gstest::ct8(), nodes({7}));
  ASSERT_GE(r.checks.size(), 1u);
  EXPECT_TRUE(r.checks[0].alarm);
  EXPECT_FALSE(r.cleared_by_isolation);
  EXPECT_EQ(r.unresolved, nodes({6}));
}

TEST(Localize, Ct8TwoTampers) {
  const auto r = run_ct8(gstest::ct8(), nodes({5, 7}));
  EXPECT_EQ(r.final_suspects, nodes({5, 7}));
  ASSERT_GE(r.suspect_history.size(), 3u);
  EXPECT_EQ(r.suspect_history.back().frtu, E(1));
  EXPECT_EQ(r.suspect_history.back().nodes, nodes({5}));
}

TEST(Localize, Ct8LeafBehindSuspectIsIrreducible) {
  const auto r = run_ct8(gstest::ct8(), nodes({3}), 1);
  EXPECT_TRUE(r.irreducible);
  EXPECT_EQ(r.final_suspects, nodes({3, 4}));
  EXPECT_TRUE(r.constraint_violations.empty());
}

TEST(Localize, InputErrors) {
  const Topology t = gstest::ct8();
  gstest::IdealOracle oracle(t, nodes({5}));
  try {
    localize(t, t.normal_state(), t.source_vector(), t.dg_vector(), E(2), oracle);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotABreaker);
  }
  try {
    localize(t, SwitchVector(3, true), t.source_vector(), t.dg_vector(), E(7), oracle);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

// Runs fuzzed single-tamper episodes on path feeders joined tail to tail.
TEST(LocalizeProperty, SingleTamperSoundnessAndBudget) {
  std::mt19937_64 rng(2024);
  int episodes = 0;
  while (episodes < 500) {
    const Topology t = gstest::isolatable_feeders(rng);
    const SwitchVector v0 = t.normal_state();
    const auto zones = gstest::bfs_zones(t, v0);
    const auto& frtu = t.frtus()[rng() % t.frtus().size()];
    const auto& zone = zones.at(frtu.breaker);
    auto it = zone.begin();
    std::advance(it, static_cast<long>(rng() % zone.size()));
    const NodeId culprit = *it;

    gstest::IdealOracle oracle(t, {culprit});
    const auto r = localize(t, v0, t.source_vector(), t.dg_vector(), frtu.breaker, oracle);
    ++episodes;
    SCOPED_TRACE(episodes);

    // first suspect set equals the zero set after tripping the alarm breaker
    const auto vf = feeder_trip_energization(t, incidence_matrix(t), v0, t.source_vector(), frtu.breaker);
    ASSERT_EQ(r.suspect_history.front().nodes, zero_set(vf));
    ASSERT_EQ(r.suspect_history.front().nodes, zone);

    for (const auto& step : r.suspect_history) ASSERT_TRUE(step.nodes.contains(culprit));
    ASSERT_EQ(r.final_suspects, NodeSet{culprit});
    ASSERT_FALSE(r.irreducible);

    const auto replayed = gstest::replay(t, v0, r.actions);
    ASSERT_TRUE(replayed.supplied);
    ASSERT_TRUE(replayed.loop_free_commits);
    ASSERT_TRUE(replayed.closes_first);
    ASSERT_EQ(replayed.final_state, r.final_state);
    ASSERT_TRUE(r.constraint_violations.empty());

    const auto budget = r.islands.size() +
                        static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(zone.size())))) + 1;
    ASSERT_LE(r.checks.size(), budget);
    ASSERT_EQ(static_cast<std::size_t>(oracle.queries), r.checks.size());
  }
}

std::string describe(const Topology& t, const NodeSet& tampered, const LocalizationReport& r) {
  std::string out = "tampered " + format_nodes(t, tampered) + "\n";
  for (const auto& e : t.edges()) {
    out += e.label + " " + t.node(e.a).label + "-" + t.node(e.b).label + " " + std::string(to_string(e.kind.kind)) + "\n";
  }
  for (const auto& n : t.nodes()) {
    if (n.role.has_dg) out += "dg " + n.label + "\n";
  }
  for (const auto& line : r.log) out += line + "\n";
  return out;
}

// Tree feeders with random ties: plans may end irreducible, but never
// exonerate a tampered node or break supply.
TEST(LocalizeProperty, MultiTamperTreesStaySafe) {
  std::mt19937_64 rng(77);
  gstest::FeederOptions opt;
  opt.paths = false;
  int episodes = 0;
  while (episodes < 500) {
    const Topology t = gstest::isolatable_feeders(rng, opt);
    const SwitchVector v0 = t.normal_state();
    NodeSet tampered;
    for (NodeId n : t.loads()) {
      if (rng() % 4 == 0) tampered.insert(n);
    }
    gstest::IdealOracle oracle(t, tampered);
    const auto zones = gstest::bfs_zones(t, v0);
    std::vector<EdgeId> alarming;
    for (const auto& f : t.frtus()) {
      if (oracle.alarm(v0, f.breaker)) alarming.push_back(f.breaker);
    }
    if (alarming.empty()) continue;
    const std::optional<EdgeId> alarm = alarming[rng() % alarming.size()];
    oracle.queries = 0;
    const auto r = localize(t, v0, t.source_vector(), t.dg_vector(), *alarm, oracle, alarming);
    ++episodes;
    SCOPED_TRACE(episodes);

    NodeSet in_zone;
    for (NodeId n : tampered) {
      if (zones.at(*alarm).contains(n)) in_zone.insert(n);
    }
    for (NodeId n : in_zone) ASSERT_TRUE(r.final_suspects.contains(n) || r.unresolved.contains(n));
    bool hit = false;
    for (NodeId n : r.final_suspects) hit = hit || tampered.contains(n);
    ASSERT_TRUE(hit);
    if (!r.irreducible) {
      for (NodeId n : r.final_suspects) ASSERT_TRUE(tampered.contains(n)) << describe(t, tampered, r);
    }
    const auto replayed = gstest::replay(t, v0, r.actions);
    ASSERT_TRUE(replayed.supplied);
    ASSERT_TRUE(replayed.loop_free_commits);
    ASSERT_TRUE(r.constraint_violations.empty());
  }
}

}  // namespace
