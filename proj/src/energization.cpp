#include "gridsleuth/energization.hpp"

#include <deque>

namespace gridsleuth {

EnergizationVector energization_step(const AdjacencyMatrix& a, const EnergizationVector& prev) {
  const std::size_t n = a.node_count();
  std::vector<std::uint8_t> next(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    unsigned sum = prev[j] ? 1 : 0;
    for (std::size_t i = 0; i < n && sum == 0; ++i) sum += prev[i] && a.entries(i, j);
    next[j] = sum != 0 ? 1 : 0;
  }
  return EnergizationVector(std::move(next));
}

EnergizationTrace energize(const IncidenceMatrix& m, const SwitchVector& v, const SourceVector& s) {
  if (s.size() != m.node_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "source vector has " + std::to_string(s.size()) + " entries, incidence has " +
                    std::to_string(m.node_count()) + " nodes");
  }
  const AdjacencyMatrix a = adjacency_from_incidence(m, v);

  EnergizationTrace trace;
  EnergizationVector current(s.bits());
  EnergizationVector previous(s.size());
  while (current != previous) {
    previous = current;
    current = energization_step(a, previous);
    ++trace.iterations;
  }
  trace.energized = std::move(current);
  return trace;
}

EnergizationVector feeder_trip_energization(const Topology& t, const IncidenceMatrix& m, const SwitchVector& v,
                                            const SourceVector& s, EdgeId alarm_breaker) {
  if (v.size() != t.edge_count() || m.edge_count() != t.edge_count() || m.node_count() != t.node_count()) {
    throw Error(ErrorCode::DimensionMismatch, "switch vector or incidence matrix does not match the topology");
  }
  if (alarm_breaker.value() < 1 || alarm_breaker.offset() >= t.edge_count() || !t.is_breaker(alarm_breaker)) {
    throw Error(ErrorCode::NotABreaker, "edge index " + std::to_string(alarm_breaker.value()) + " is not a feeder breaker");
  }
  SwitchVector tripped = v;
  tripped.set(alarm_breaker, false);
  return energized_nodes(m, tripped, s);
}

NodeSet zero_set(const EnergizationVector& vf) {
  NodeSet out;
  for (std::size_t i = 0; i < vf.size(); ++i) {
    if (!vf[i]) out.insert(NodeId::from_offset(i));
  }
  return out;
}

std::map<EdgeId, NodeSet> feeder_zones(const Topology& t, const SwitchVector& v) {
  if (v.size() != t.edge_count()) {
    throw Error(ErrorCode::DimensionMismatch, "switch vector length does not match the topology");
  }
  std::map<EdgeId, NodeSet> zones;
  std::vector<bool> claimed(t.node_count(), false);
  for (const auto& f : t.frtus()) {
    NodeSet& zone = zones[f.breaker];
    if (!v[f.breaker]) continue;
    const Edge& breaker = t.edge(f.breaker);
    NodeId start = t.is_source(breaker.a) ? breaker.b : breaker.a;
    if (claimed[start.offset()]) continue;

    std::deque<NodeId> queue{start};
    claimed[start.offset()] = true;
    while (!queue.empty()) {
      NodeId n = queue.front();
      queue.pop_front();
      zone.insert(n);
      for (EdgeId e : t.incident(n)) {
        if (!v[e]) continue;
        NodeId next = t.edge(e).other(n);
        if (t.is_source(next) || claimed[next.offset()]) continue;
        claimed[next.offset()] = true;
        queue.push_back(next);
      }
    }
  }
  return zones;
}

}  // namespace gridsleuth
