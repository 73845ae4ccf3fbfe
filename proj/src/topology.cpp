#include "gridsleuth/topology.hpp"

#include <numeric>
#include <set>
#include <unordered_map>

#include "gridsleuth/energization.hpp"

namespace gridsleuth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::ParallelEdge: return "ParallelEdge";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::NonRadialNormalState: return "NonRadialNormalState";
    case ErrorCode::BreakerNotAtSource: return "BreakerNotAtSource";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotABreaker: return "NotABreaker";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidSwitchVector: return "InvalidSwitchVector";
    case ErrorCode::UnknownFrtu: return "UnknownFrtu";
    case ErrorCode::ZeroAggregateWithNonzeroReports: return "ZeroAggregateWithNonzeroReports";
    case ErrorCode::InfeasibleIsolation: return "InfeasibleIsolation";
    case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::OracleInconsistent: return "OracleInconsistent";
    case ErrorCode::CountOutOfRange: return "CountOutOfRange";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::MeterNotOnNode: return "MeterNotOnNode";
  }
  return "Unknown";
}

std::string_view to_string(SwitchKind kind) noexcept {
  switch (kind) {
    case SwitchKind::FeederBreaker: return "breaker";
    case SwitchKind::Sectionalizer: return "sectionalizer";
    case SwitchKind::TieSwitch: return "tie";
  }
  return "?";
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }

  std::vector<std::size_t> parent;
};

}  // namespace

std::optional<NodeId> Topology::find_node(std::string_view label) const {
  for (const auto& n : nodes_) {
    if (n.label == label) return n.id;
  }
  return std::nullopt;
}

std::optional<EdgeId> Topology::find_edge(std::string_view label) const {
  for (const auto& e : edges_) {
    if (e.label == label) return e.id;
  }
  return std::nullopt;
}

const Frtu& Topology::frtu(EdgeId breaker) const {
  for (const auto& f : frtus_) {
    if (f.breaker == breaker) return f;
  }
  throw Error(ErrorCode::NotABreaker, "edge " + std::to_string(breaker.value()) + " carries no FRTU");
}

std::optional<EdgeId> Topology::find_frtu(std::string_view name) const {
  for (const auto& f : frtus_) {
    if (f.name == name) return f.breaker;
  }
  return std::nullopt;
}

SwitchVector Topology::normal_state() const {
  SwitchVector v(edges_.size());
  for (const auto& e : edges_) v.set(e.id, e.kind.normal_state == NormalState::NormallyClosed);
  return v;
}

SourceVector Topology::source_vector() const {
  SourceVector s(nodes_.size());
  for (const auto& n : nodes_) s.set(n.id, n.role.kind == NodeKind::SubstationSource);
  return s;
}

DgVector Topology::dg_vector() const {
  DgVector g(nodes_.size());
  for (const auto& n : nodes_) g.set(n.id, n.role.has_dg);
  return g;
}

NodeSet Topology::loads() const {
  NodeSet out;
  for (const auto& n : nodes_) {
    if (n.role.kind == NodeKind::Load) out.insert(n.id);
  }
  return out;
}

Topology build_topology(const TopologySpec& spec) {
  Topology t;
  std::unordered_map<std::string, NodeId> by_label;

  for (const auto& ns : spec.nodes) {
    if (ns.id.empty()) throw Error(ErrorCode::InvalidSpec, "node with empty id");
    if (by_label.contains(ns.id)) throw Error(ErrorCode::DuplicateId, "node '" + ns.id + "' declared twice");
    if (ns.kind == NodeKind::SubstationSource && ns.dg) {
      throw Error(ErrorCode::InvalidSpec, "source node '" + ns.id + "' cannot also carry a DG");
    }
    NodeId id = NodeId::from_offset(t.nodes_.size());
    by_label.emplace(ns.id, id);
    t.nodes_.push_back(Node{id, ns.id, NodeRole{ns.kind, ns.dg}});
  }
  if (t.nodes_.empty()) throw Error(ErrorCode::InvalidSpec, "topology has no nodes");

  std::set<std::string> edge_labels;
  std::set<std::pair<NodeId, NodeId>> pairs;
  std::set<std::string> frtu_names;
  t.incident_.assign(t.nodes_.size(), {});

  for (const auto& es : spec.edges) {
    if (es.id.empty()) throw Error(ErrorCode::InvalidSpec, "edge with empty id");
    if (!edge_labels.insert(es.id).second) {
      throw Error(ErrorCode::DuplicateId, "edge '" + es.id + "' declared twice");
    }
    auto a = by_label.find(es.from);
    auto b = by_label.find(es.to);
    if (a == by_label.end() || b == by_label.end()) {
      throw Error(ErrorCode::DanglingEndpoint,
                  "edge '" + es.id + "' references unknown node '" + (a == by_label.end() ? es.from : es.to) + "'");
    }
    if (a->second == b->second) throw Error(ErrorCode::SelfLoop, "edge '" + es.id + "' joins node '" + es.from + "' to itself");
    auto key = std::minmax(a->second, b->second);
    if (!pairs.insert(key).second) {
      throw Error(ErrorCode::ParallelEdge, "edge '" + es.id + "' duplicates an existing endpoint pair");
    }

    EdgeId id = EdgeId::from_offset(t.edges_.size());
    EdgeKind kind{es.kind, es.kind == SwitchKind::TieSwitch ? NormalState::NormallyOpen : NormalState::NormallyClosed};
    t.edges_.push_back(Edge{id, es.id, kind, a->second, b->second});
    t.incident_[a->second.offset()].push_back(id);
    t.incident_[b->second.offset()].push_back(id);

    if (es.kind == SwitchKind::FeederBreaker) {
      int sources = t.is_source(a->second) + t.is_source(b->second);
      if (sources != 1) {
        throw Error(ErrorCode::BreakerNotAtSource,
                    "breaker '" + es.id + "' must join exactly one source node, found " + std::to_string(sources));
      }
      std::string name = es.frtu.value_or("FRTU@" + es.id);
      if (!frtu_names.insert(name).second) throw Error(ErrorCode::DuplicateId, "FRTU '" + name + "' assigned twice");
      t.frtus_.push_back(Frtu{id, std::move(name)});
    } else if (es.frtu) {
      throw Error(ErrorCode::InvalidSpec, "edge '" + es.id + "' is not a breaker but names an FRTU");
    }
  }

  // Radial normal state: normally-closed edges form a forest and each
  // component holds exactly one source.
  DisjointSets sets(t.nodes_.size());
  for (const auto& e : t.edges_) {
    if (e.kind.normal_state != NormalState::NormallyClosed) continue;
    if (!sets.unite(e.a.offset(), e.b.offset())) {
      throw Error(ErrorCode::NonRadialNormalState, "normally-closed edge '" + e.label + "' closes a loop");
    }
  }
  std::vector<int> sources_in(t.nodes_.size(), 0);
  for (const auto& n : t.nodes_) {
    if (n.role.kind == NodeKind::SubstationSource) ++sources_in[sets.find(n.id.offset())];
  }
  for (const auto& n : t.nodes_) {
    int k = sources_in[sets.find(n.id.offset())];
    if (k > 1) {
      throw Error(ErrorCode::NonRadialNormalState, "node '" + n.label + "' is tied to " + std::to_string(k) + " sources");
    }
    if (k == 0) {
      throw Error(ErrorCode::NonRadialNormalState, "load '" + n.label + "' has no source in the normal state");
    }
  }
  return t;
}

IncidenceMatrix incidence_matrix(const Topology& t) {
  IncidenceMatrix m{BinaryMatrix(t.node_count(), t.edge_count())};
  for (const auto& e : t.edges()) {
    m.entries(e.a.offset(), e.id.offset()) = 1;
    m.entries(e.b.offset(), e.id.offset()) = 1;
  }
  return m;
}

AdjacencyMatrix adjacency_from_incidence(const IncidenceMatrix& m, const SwitchVector& v) {
  const std::size_t nv = m.node_count();
  const std::size_t ne = m.edge_count();
  if (v.size() != ne) {
    throw Error(ErrorCode::DimensionMismatch,
                "switch vector has " + std::to_string(v.size()) + " entries, incidence has " + std::to_string(ne) + " edges");
  }
  // Column masking: an open switch removes its edge column.
  BinaryMatrix masked = m.entries;
  for (std::size_t j = 0; j < ne; ++j) {
    if (v[j]) continue;
    for (std::size_t i = 0; i < nv; ++i) masked(i, j) = 0;
  }
  AdjacencyMatrix a{BinaryMatrix(nv, nv)};
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t k = i + 1; k < nv; ++k) {
      unsigned sum = 0;
      for (std::size_t j = 0; j < ne; ++j) sum += masked(i, j) * masked(k, j);
      std::uint8_t bit = sum != 0 ? 1 : 0;
      a.entries(i, k) = bit;
      a.entries(k, i) = bit;
    }
  }
  return a;
}

}  // namespace gridsleuth
