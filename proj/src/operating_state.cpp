#include <map>
#include <numeric>

#include "gridsleuth/energization.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

NodeSet OperatingState::island_nodes() const {
  NodeSet out;
  for (const auto& island : dg_islands) out.insert(island.begin(), island.end());
  return out;
}

OperatingState validate_operating_state(const Topology& t, const SwitchVector& v, bool allow_loops) {
  if (v.size() != t.edge_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "switch vector has " + std::to_string(v.size()) + " entries, topology has " +
                    std::to_string(t.edge_count()) + " edges");
  }
  OperatingState out;
  out.allow_loops = allow_loops;

  std::vector<std::size_t> parent(t.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Substations share the transmission bus, so a path between two of them is a loop.
  std::optional<std::size_t> bus;
  for (const auto& n : t.nodes()) {
    if (n.role.kind != NodeKind::SubstationSource) continue;
    if (bus) parent[n.id.offset()] = *bus;
    else bus = n.id.offset();
  }
  for (const auto& e : t.edges()) {
    if (!v[e.id]) continue;
    auto ra = find(e.a.offset());
    auto rb = find(e.b.offset());
    if (ra == rb) {
      out.loop_edges.push_back(e.id);
    } else {
      parent[rb] = ra;
    }
  }

  const auto energized = energized_nodes(incidence_matrix(t), v, t.source_vector());
  for (const auto& n : t.nodes()) {
    if (n.role.kind == NodeKind::Load && !energized[n.id]) out.deenergized_loads.insert(n.id);
  }

  // Components without a source; keep those holding a DG.
  std::map<std::size_t, NodeSet> dark_components;
  for (NodeId n : out.deenergized_loads) dark_components[find(n.offset())].insert(n);
  for (auto& [root, members] : dark_components) {
    bool has_dg = false;
    for (NodeId n : members) has_dg = has_dg || t.node(n).role.has_dg;
    if (has_dg) {
      out.dg_islands.push_back(members);
    } else {
      out.unsupplied_loads.insert(members.begin(), members.end());
    }
  }
  std::sort(out.dg_islands.begin(), out.dg_islands.end());
  return out;
}

}  // namespace gridsleuth
