#include "gridsleuth/planner.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gridsleuth/energization.hpp"

namespace gridsleuth {

std::string format_nodes(const Topology& t, const NodeSet& nodes) {
  std::string out = "{";
  bool first = true;
  for (NodeId n : nodes) {
    if (!first) out += ", ";
    out += t.node(n).label;
    first = false;
  }
  return out + "}";
}

namespace {

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

NodeSet subtract(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool includes(const NodeSet& outer, const NodeSet& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

// Graph-walk view of a configuration. Same rules as validate_operating_state,
// cheap enough for the move search.
struct Snapshot {
  bool cycle = false;
  std::vector<bool> energized;
  std::vector<NodeSet> islands;
  NodeSet island_nodes;
  NodeSet unsupplied;
};

Snapshot inspect(const Topology& t, const SwitchVector& v) {
  std::vector<std::size_t> parent(t.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::optional<std::size_t> bus;
  for (const auto& n : t.nodes()) {
    if (n.role.kind != NodeKind::SubstationSource) continue;
    if (bus) parent[n.id.offset()] = *bus;
    else bus = n.id.offset();
  }
  Snapshot snap;
  for (const auto& e : t.edges()) {
    if (!v[e.id]) continue;
    auto ra = find(e.a.offset());
    auto rb = find(e.b.offset());
    if (ra == rb) {
      snap.cycle = true;
    } else {
      parent[rb] = ra;
    }
  }
  std::vector<bool> has_source(t.node_count(), false);
  std::vector<bool> has_dg(t.node_count(), false);
  for (const auto& n : t.nodes()) {
    auto r = find(n.id.offset());
    has_source[r] = has_source[r] || n.role.kind == NodeKind::SubstationSource;
    has_dg[r] = has_dg[r] || n.role.has_dg;
  }
  snap.energized.assign(t.node_count(), false);
  std::map<std::size_t, NodeSet> islands;
  for (const auto& n : t.nodes()) {
    auto r = find(n.id.offset());
    if (has_source[r]) {
      snap.energized[n.id.offset()] = true;
    } else if (has_dg[r]) {
      islands[r].insert(n.id);
      snap.island_nodes.insert(n.id);
    } else {
      snap.unsupplied.insert(n.id);
    }
  }
  for (auto& [root, members] : islands) snap.islands.push_back(std::move(members));
  std::sort(snap.islands.begin(), snap.islands.end());
  return snap;
}

std::optional<EdgeId> zone_of(const std::map<EdgeId, NodeSet>& zones, const NodeSet& nodes) {
  for (const auto& [breaker, zone] : zones) {
    if (!nodes.empty() && includes(zone, nodes)) return breaker;
  }
  return std::nullopt;
}

// Shared bookkeeping for anything that switches and measures.
class Recorder {
 public:
  Recorder(const Topology& t, SwitchVector v, MeasurementOracle& oracle) : t_(t), v_(std::move(v)), oracle_(oracle) {}

  const SwitchVector& state() const noexcept { return v_; }

  /// One make-before-break group: closes first, then opens.
  void commit(const std::vector<EdgeId>& closes, const std::vector<EdgeId>& opens) {
    ++group_;
    auto run = [&](EdgeId e, SwitchOp op) {
      v_.set(e, op == SwitchOp::Close);
      actions.push_back(SwitchingAction{e, op, ++step_, group_});
      const Edge& edge = t_.edge(e);
      log.push_back("step " + std::to_string(step_) + ": " + (op == SwitchOp::Close ? "close " : "open ") + edge.label +
                    " (" + std::string(to_string(edge.kind.kind)) + ")");
      auto st = validate_operating_state(t_, v_, true);
      if (!st.unsupplied_loads.empty()) {
        violations.push_back("step " + std::to_string(step_) + " leaves loads " +
                             format_nodes(t_, st.unsupplied_loads) + " without supply");
      }
    };
    for (EdgeId e : closes) run(e, SwitchOp::Close);
    for (EdgeId e : opens) run(e, SwitchOp::Open);
    if (validate_operating_state(t_, v_, false).has_cycle()) {
      violations.push_back("step " + std::to_string(step_) + " commits a closed loop");
    }
  }

  bool check(EdgeId breaker, const NodeSet& zone) {
    const bool alarm = oracle_.alarm(v_, breaker);
    checks.push_back(FrtuCheck{breaker, alarm, step_, zone});
    return alarm;
  }

  std::string check_text(EdgeId breaker, bool alarm) const {
    return "check " + t_.frtu(breaker).name + (alarm ? " (alarm)" : " (clear)");
  }

  std::vector<SwitchingAction> actions;
  std::vector<FrtuCheck> checks;
  std::vector<std::string> log;
  std::vector<std::string> violations;

 private:
  const Topology& t_;
  SwitchVector v_;
  MeasurementOracle& oracle_;
  int step_ = 0;
  int group_ = 0;
};

// Edge that brings an isolated island back onto an energized feeder.
EdgeId reconnect_edge(const Topology& t, const SwitchVector& v, const Snapshot& snap, const NodeSet& island,
                      const std::vector<Island>& known) {
  auto feeds_island = [&](EdgeId e) {
    if (v[e]) return false;
    const Edge& edge = t.edge(e);
    const bool a_in = island.contains(edge.a);
    const bool b_in = island.contains(edge.b);
    if (a_in == b_in) return false;
    return static_cast<bool>(snap.energized[(a_in ? edge.b : edge.a).offset()]);
  };
  for (const auto& k : known) {
    if (k.reconnect && includes(k.nodes, island) && feeds_island(*k.reconnect)) return *k.reconnect;
  }
  for (NodeId n : island) {
    for (EdgeId e : t.incident(n)) {
      if (feeds_island(e)) return e;
    }
  }
  throw Error(ErrorCode::InfeasiblePlan, "island " + format_nodes(t, island) + " has no switch back to a feeder");
}

void restore_island(const Topology& t, Recorder& rec, const NodeSet& island, const std::vector<Island>& known) {
  const Snapshot snap = inspect(t, rec.state());
  EdgeId e = reconnect_edge(t, rec.state(), snap, island, known);
  rec.log.push_back("restore island " + format_nodes(t, island) + " via " + t.edge(e).label);
  rec.commit({e}, {});
}

class Localizer {
 public:
  Localizer(const Topology& t, const SwitchVector& v0, const SourceVector& s, MeasurementOracle& oracle)
      : t_(t), rec_(t, v0, oracle), s_(s) {}

  LocalizationReport run(const DgVector& g, EdgeId alarm, const std::vector<EdgeId>& concurrent) {
    LocalizationReport report;
    report.alarm = alarm;
    report.initial_state = rec_.state();

    const auto m = incidence_matrix(t_);
    const NodeSet initial = zero_set(feeder_trip_energization(t_, m, rec_.state(), s_, alarm));
    const auto start_zones = feeder_zones(t_, rec_.state());
    for (EdgeId b : concurrent) {
      if (b == alarm) continue;
      const NodeSet& zone = start_zones.at(b);
      unverified_.insert(zone.begin(), zone.end());
    }
    unverified_ = subtract(unverified_, initial);
    rec_.log.push_back("alarm at " + t_.frtu(alarm).name + " (" + t_.edge(alarm).label + ")");
    rec_.log.push_back("trip " + t_.edge(alarm).label + " -> suspects " + format_nodes(t_, initial));

    IsolationPlan iso;
    try {
      iso = isolate_dg_islands(t_, rec_.state(), g);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InfeasibleIsolation) throw Error(ErrorCode::InfeasiblePlan, e.what());
      throw;
    }
    islands_ = iso.islands;
    for (const auto& island : islands_) rec_.log.push_back("isolate DG island " + format_nodes(t_, island.nodes));
    if (!iso.actions.empty()) {
      std::vector<EdgeId> closes, opens;
      for (const auto& a : iso.actions) (a.action == SwitchOp::Close ? closes : opens).push_back(a.edge);
      rec_.commit(closes, opens);
    }
    watch_isolation_ = !islands_.empty();

    confirm(round(alarm, initial));
    sweep(initial);

    report.final_state = rec_.state();
    report.islands = islands_;
    report.actions = std::move(rec_.actions);
    report.checks = std::move(rec_.checks);
    report.suspect_history = std::move(history_);
    report.final_suspects = confirmed_;
    report.unresolved = subtract(subtract(initial, exonerated_), confirmed_);
    report.irreducible = irreducible_;
    report.cleared_by_isolation = cleared_by_isolation_;
    report.constraint_violations = std::move(rec_.violations);
    std::string verdict = confirmed_.size() == 1 ? "verdict node " : "verdict nodes ";
    std::string names = format_nodes(t_, confirmed_);
    verdict += names.substr(1, names.size() - 2);
    if (irreducible_) verdict += " (irreducible)";
    rec_.log.push_back(verdict);
    report.log = std::move(rec_.log);
    return report;
  }

 private:
  void confirm(const NodeSet& found) {
    confirmed_.insert(found.begin(), found.end());
  }

  // Narrows a suspect set believed to hold one tampered node.
  NodeSet round(EdgeId alarm, NodeSet suspects) {
    history_.push_back(SuspectStep{alarm, suspects});
    while (suspects.size() > 1) {
      const auto zones = feeder_zones(t_, rec_.state());
      if (informative_check(zones, alarm, suspects)) {
        history_.push_back(SuspectStep{alarm, suspects});
        continue;
      }

      const Snapshot snap = inspect(t_, rec_.state());
      if (includes(snap.island_nodes, suspects)) {
        // Suspects only in isolated islands: bring one back so an FRTU sees it.
        for (const auto& island : snap.islands) {
          if (!intersect(island, suspects).empty()) {
            restore_island(t_, rec_, island, islands_);
            break;
          }
        }
        continue;
      }

      auto holder = zone_of(zones, suspects);
      if (!holder) {
        irreducible_ = true;
        break;
      }
      alarm = *holder;
      if (auto move = best_split(suspects, alarm)) {
        rec_.log.push_back("transfer: close " + t_.edge(move->first).label + ", open " + t_.edge(move->second).label);
        rec_.commit({move->first}, {move->second});
        continue;
      }
      if (!snap.islands.empty()) {
        // An isolated island that is no longer suspect may block every transfer.
        restore_island(t_, rec_, snap.islands.front(), islands_);
        continue;
      }
      irreducible_ = true;
      break;
    }
    return suspects;
  }

  // Checks the first FRTU (alarming one first, then by breaker id) whose zone
  // splits the suspect set.
  bool informative_check(const std::map<EdgeId, NodeSet>& zones, EdgeId& alarm, NodeSet& suspects) {
    std::vector<EdgeId> order{alarm};
    for (const auto& f : t_.frtus()) {
      if (f.breaker != alarm) order.push_back(f.breaker);
    }
    for (EdgeId g : order) {
      const NodeSet& zone = zones.at(g);
      const std::size_t k = intersect(zone, suspects).size();
      if (k == 0 || k == suspects.size()) continue;
      // An alarm could come from a load another alarming feeder brought along.
      if (!intersect(zone, unverified_).empty()) continue;

      const bool alarmed = rec_.check(g, zone);
      if (alarmed) {
        suspects = intersect(suspects, zone);
        alarm = g;
      } else {
        suspects = subtract(suspects, zone);
        clear(zone);
      }
      rec_.log.push_back(rec_.check_text(g, alarmed) + " -> suspects " + format_nodes(t_, suspects));
      if (watch_isolation_) {
        watch_isolation_ = false;
        if (!alarmed && g == history_.front().frtu) {
          cleared_by_isolation_ = true;
          rec_.log.push_back("alarm cleared under isolation");
        }
      }
      return true;
    }
    return false;
  }

  // Close one open switch and open one closed switch so that the alarming
  // FRTU keeps as close to half the suspects as possible.
  std::optional<std::pair<EdgeId, EdgeId>> best_split(const NodeSet& suspects, EdgeId frtu) {
    const SwitchVector& v = rec_.state();
    const Snapshot before = inspect(t_, v);
    std::optional<std::pair<EdgeId, EdgeId>> best;
    std::size_t best_score = suspects.size();
    for (const auto& open_edge : t_.edges()) {
      if (!v[open_edge.id] || open_edge.kind.kind == SwitchKind::FeederBreaker) continue;
      for (const auto& close_edge : t_.edges()) {
        if (v[close_edge.id] || close_edge.kind.kind == SwitchKind::FeederBreaker) continue;
        SwitchVector next = v;
        next.set(close_edge.id, true);
        next.set(open_edge.id, false);
        const Snapshot after = inspect(t_, next);
        if (after.cycle || !after.unsupplied.empty() || !includes(before.island_nodes, after.island_nodes)) continue;
        const NodeSet zone = feeder_zones(t_, next).at(frtu);
        if (!intersect(zone, unverified_).empty()) continue;
        const std::size_t kept = intersect(zone, suspects).size();
        if (kept == 0 || kept == suspects.size()) continue;
        const std::size_t score = 2 * kept > suspects.size() ? 2 * kept - suspects.size() : suspects.size() - 2 * kept;
        if (!best || score < best_score) {
          best = std::make_pair(close_edge.id, open_edge.id);
          best_score = score;
        }
      }
    }
    return best;
  }

  // Further alarming feeders: anything suspected at the start that is neither
  // cleared nor confirmed gets a look from the FRTU now covering it.
  void sweep(const NodeSet& initial) {
    for (;;) {
      const NodeSet deferred = subtract(subtract(initial, exonerated_), confirmed_);
      if (deferred.empty()) return;
      const auto zones = feeder_zones(t_, rec_.state());
      std::optional<EdgeId> next;
      for (const auto& [breaker, zone] : zones) {
        if (!intersect(zone, deferred).empty() && intersect(zone, confirmed_).empty() &&
            intersect(zone, unverified_).empty()) {
          next = breaker;
          break;
        }
      }
      if (!next) return;
      const NodeSet& zone = zones.at(*next);
      const bool alarmed = rec_.check(*next, zone);
      rec_.log.push_back(rec_.check_text(*next, alarmed));
      if (alarmed) {
        rec_.log.push_back("re-enter with alarm index " + t_.edge(*next).label);
        confirm(round(*next, intersect(zone, deferred)));
      } else {
        clear(zone);
      }
    }
  }

  void clear(const NodeSet& zone) {
    exonerated_.insert(zone.begin(), zone.end());
    unverified_ = subtract(unverified_, zone);
  }

  const Topology& t_;
  Recorder rec_;
  SourceVector s_;
  std::vector<Island> islands_;
  std::vector<SuspectStep> history_;
  NodeSet exonerated_;
  /// Loads outside the episode that sat behind another alarming FRTU.
  NodeSet unverified_;
  NodeSet confirmed_;
  bool irreducible_ = false;
  bool watch_isolation_ = false;
  bool cleared_by_isolation_ = false;
};

}  // namespace

IsolationPlan isolate_dg_islands(const Topology& t, const SwitchVector& v, const DgVector& g) {
  if (v.size() != t.edge_count() || g.size() != t.node_count()) {
    throw Error(ErrorCode::DimensionMismatch, "switch or DG vector does not match the topology");
  }
  for (const auto& n : t.nodes()) {
    if (g[n.id] && !n.role.has_dg) {
      throw Error(ErrorCode::InvalidSpec, "DG vector marks node '" + n.label + "' which has no generator");
    }
  }

  const Snapshot before = inspect(t, v);
  // Energized DG nodes, grouped into clusters joined by closed edges.
  std::vector<NodeSet> clusters;
  std::vector<bool> seen(t.node_count(), false);
  for (const auto& n : t.nodes()) {
    if (!g[n.id] || !before.energized[n.id.offset()] || seen[n.id.offset()]) continue;
    NodeSet cluster;
    std::vector<NodeId> stack{n.id};
    seen[n.id.offset()] = true;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      cluster.insert(x);
      for (EdgeId e : t.incident(x)) {
        NodeId y = t.edge(e).other(x);
        if (v[e] && g[y] && !seen[y.offset()]) {
          seen[y.offset()] = true;
          stack.push_back(y);
        }
      }
    }
    clusters.push_back(std::move(cluster));
  }

  IsolationPlan plan;
  plan.state = v;
  if (clusters.empty()) return plan;

  // Upstream edge of each cluster: the edge a breadth-first walk from the
  // sources crosses first to enter it.
  std::vector<std::optional<EdgeId>> entered_by(t.node_count());
  {
    std::vector<bool> visited(t.node_count(), false);
    std::vector<NodeId> frontier;
    for (const auto& n : t.nodes()) {
      if (n.role.kind == NodeKind::SubstationSource) {
        visited[n.id.offset()] = true;
        frontier.push_back(n.id);
      }
    }
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      NodeId x = frontier[i];
      for (EdgeId e : t.incident(x)) {
        NodeId y = t.edge(e).other(x);
        if (!v[e] || visited[y.offset()]) continue;
        visited[y.offset()] = true;
        entered_by[y.offset()] = e;
        frontier.push_back(y);
      }
    }
  }

  std::set<EdgeId> opened;
  NodeSet cluster_nodes;
  for (const auto& cluster : clusters) {
    Island island;
    island.nodes = cluster;
    for (NodeId x : cluster) {
      cluster_nodes.insert(x);
      for (EdgeId e : t.incident(x)) {
        if (v[e] && !cluster.contains(t.edge(e).other(x))) {
          opened.insert(e);
          island.opened.push_back(e);
        }
        if (entered_by[x.offset()] == e && !cluster.contains(t.edge(e).other(x))) island.reconnect = e;
      }
    }
    std::sort(island.opened.begin(), island.opened.end());
    island.opened.erase(std::unique(island.opened.begin(), island.opened.end()), island.opened.end());
    plan.islands.push_back(std::move(island));
  }

  SwitchVector w = v;
  for (EdgeId e : opened) w.set(e, false);

  std::vector<EdgeId> closes;
  for (;;) {
    const Snapshot snap = inspect(t, w);
    if (snap.unsupplied.empty()) break;
    std::optional<EdgeId> pick;
    for (const auto& e : t.edges()) {
      if (w[e.id] || e.kind.kind == SwitchKind::FeederBreaker || opened.contains(e.id)) continue;
      if (cluster_nodes.contains(e.a) || cluster_nodes.contains(e.b)) continue;
      const bool a_live = snap.energized[e.a.offset()];
      const bool b_live = snap.energized[e.b.offset()];
      const bool a_dark = snap.unsupplied.contains(e.a);
      const bool b_dark = snap.unsupplied.contains(e.b);
      if (!((a_live && b_dark) || (b_live && a_dark))) continue;
      // Ties before other open switches, then lowest id.
      const bool tie = e.kind.kind == SwitchKind::TieSwitch;
      if (!pick || (tie && t.edge(*pick).kind.kind != SwitchKind::TieSwitch)) pick = e.id;
    }
    if (!pick) {
      throw Error(ErrorCode::InfeasibleIsolation,
                  "loads " + format_nodes(t, snap.unsupplied) + " cannot be re-fed after isolating DG clusters");
    }
    w.set(*pick, true);
    closes.push_back(*pick);
  }

  int step = 0;
  for (EdgeId e : closes) plan.actions.push_back(SwitchingAction{e, SwitchOp::Close, ++step, 1});
  for (EdgeId e : opened) plan.actions.push_back(SwitchingAction{e, SwitchOp::Open, ++step, 1});
  plan.state = std::move(w);
  return plan;
}

RestorationFragment sequential_restoration(const Topology& t, const SwitchVector& v, const std::vector<Island>& islands,
                                           EdgeId alarm_breaker, MeasurementOracle& oracle) {
  if (v.size() != t.edge_count()) throw Error(ErrorCode::DimensionMismatch, "switch vector does not match the topology");
  if (alarm_breaker.value() < 1 || alarm_breaker.offset() >= t.edge_count() || !t.is_breaker(alarm_breaker)) {
    throw Error(ErrorCode::NotABreaker, "edge index " + std::to_string(alarm_breaker.value()) + " is not a feeder breaker");
  }
  Recorder rec(t, v, oracle);
  RestorationFragment frag;
  auto finish = [&]() {
    frag.state = rec.state();
    frag.actions = std::move(rec.actions);
    frag.checks = std::move(rec.checks);
    frag.log = std::move(rec.log);
    return frag;
  };
  if (islands.empty()) return finish();

  const bool alarmed = rec.check(alarm_breaker, feeder_zones(t, v).at(alarm_breaker));
  rec.log.push_back(rec.check_text(alarm_breaker, alarmed));
  if (alarmed) {
    frag.skipped = true;
    rec.log.push_back("alarm persists under isolation; restoration skipped");
    return finish();
  }
  rec.log.push_back("alarm cleared under isolation");

  for (std::size_t i = 0; i < islands.size(); ++i) {
    restore_island(t, rec, islands[i].nodes, islands);
    const auto zones = feeder_zones(t, rec.state());
    auto holder = zone_of(zones, islands[i].nodes);
    if (!holder) {
      throw Error(ErrorCode::InfeasiblePlan, "restored island " + format_nodes(t, islands[i].nodes) + " has no FRTU");
    }
    const bool alarm = rec.check(*holder, zones.at(*holder));
    rec.log.push_back(rec.check_text(*holder, alarm));
    if (alarm) {
      frag.culprit = i;
      frag.suspects = islands[i].nodes;
      return finish();
    }
  }
  throw Error(ErrorCode::OracleInconsistent, "alarm vanished under isolation but no island restores it");
}

LocalizationReport localize(const Topology& t, const SwitchVector& v0, const SourceVector& s, const DgVector& g,
                            EdgeId alarm_breaker, MeasurementOracle& oracle) {
  return localize(t, v0, s, g, alarm_breaker, oracle, {});
}

LocalizationReport localize(const Topology& t, const SwitchVector& v0, const SourceVector& s, const DgVector& g,
                            EdgeId alarm_breaker, MeasurementOracle& oracle, const std::vector<EdgeId>& concurrent) {
  if (v0.size() != t.edge_count() || s.size() != t.node_count() || g.size() != t.node_count()) {
    throw Error(ErrorCode::DimensionMismatch, "input vectors do not match the topology");
  }
  if (alarm_breaker.value() < 1 || alarm_breaker.offset() >= t.edge_count() || !t.is_breaker(alarm_breaker)) {
    throw Error(ErrorCode::NotABreaker, "edge index " + std::to_string(alarm_breaker.value()) + " is not a feeder breaker");
  }
  Localizer localizer(t, v0, s, oracle);
  for (EdgeId b : concurrent) {
    if (b.value() < 1 || b.offset() >= t.edge_count() || !t.is_breaker(b)) {
      throw Error(ErrorCode::NotABreaker, "edge index " + std::to_string(b.value()) + " is not a feeder breaker");
    }
  }
  return localizer.run(g, alarm_breaker, concurrent);
}

}  // namespace gridsleuth
