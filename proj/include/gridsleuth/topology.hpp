#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridsleuth/ids.hpp"
#include "gridsleuth/matrix.hpp"

namespace gridsleuth {

enum class NodeKind { SubstationSource, Load };

struct NodeRole {
  NodeKind kind = NodeKind::Load;
  bool has_dg = false;
};

enum class SwitchKind { FeederBreaker, Sectionalizer, TieSwitch };
enum class NormalState { NormallyClosed, NormallyOpen };

struct EdgeKind {
  SwitchKind kind = SwitchKind::Sectionalizer;
  NormalState normal_state = NormalState::NormallyClosed;
};

std::string_view to_string(SwitchKind kind) noexcept;

// Unvalidated description, in file order.
struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::Load;
  bool dg = false;
};

struct EdgeSpec {
  std::string id;
  SwitchKind kind = SwitchKind::Sectionalizer;
  std::string from;
  std::string to;
  std::optional<std::string> frtu;
};

struct TopologySpec {
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;
};

struct Node {
  NodeId id;
  std::string label;
  NodeRole role;
};

struct Edge {
  EdgeId id;
  std::string label;
  EdgeKind kind;
  NodeId a;
  NodeId b;

  NodeId other(NodeId n) const noexcept { return n == a ? b : a; }
  bool touches(NodeId n) const noexcept { return n == a || n == b; }
};

struct Frtu {
  EdgeId breaker;
  std::string name;
};

/// Immutable, validated distribution network. Node and edge ordering is the
/// order of the description it was built from.
class Topology {
 public:
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Node& node(NodeId id) const { return nodes_.at(id.offset()); }
  const Edge& edge(EdgeId id) const { return edges_.at(id.offset()); }

  std::optional<NodeId> find_node(std::string_view label) const;
  std::optional<EdgeId> find_edge(std::string_view label) const;

  bool is_source(NodeId id) const { return node(id).role.kind == NodeKind::SubstationSource; }
  bool is_load(NodeId id) const { return node(id).role.kind == NodeKind::Load; }
  bool is_breaker(EdgeId id) const { return edge(id).kind.kind == SwitchKind::FeederBreaker; }

  /// FRTUs ordered by breaker EdgeId.
  const std::vector<Frtu>& frtus() const noexcept { return frtus_; }
  const Frtu& frtu(EdgeId breaker) const;
  std::optional<EdgeId> find_frtu(std::string_view name) const;

  /// Normally-closed edges closed, ties open.
  SwitchVector normal_state() const;
  SourceVector source_vector() const;
  DgVector dg_vector() const;
  NodeSet loads() const;

  /// Edge ids incident to a node, ascending.
  const std::vector<EdgeId>& incident(NodeId id) const { return incident_.at(id.offset()); }

 private:
  friend Topology build_topology(const TopologySpec& spec);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Frtu> frtus_;
  std::vector<std::vector<EdgeId>> incident_;
};

/// Validates a description and freezes it. Throws Error with DuplicateId,
/// SelfLoop, ParallelEdge, DanglingEndpoint, NonRadialNormalState,
/// BreakerNotAtSource or InvalidSpec.
Topology build_topology(const TopologySpec& spec);

IncidenceMatrix incidence_matrix(const Topology& t);

/// Masks open edges out of the incidence matrix, multiplies it by its transpose, zeroes the
/// diagonal and binarizes what remains.
AdjacencyMatrix adjacency_from_incidence(const IncidenceMatrix& m, const SwitchVector& v);

/// Result of checking one switch configuration against the operating rules.
struct OperatingState {
  bool allow_loops = false;
  /// Closed edges that close a cycle when edges are added in id order.
  std::vector<EdgeId> loop_edges;
  /// Every load with no path to a substation source.
  NodeSet deenergized_loads;
  /// Source-free components that contain a DG node.
  std::vector<NodeSet> dg_islands;
  /// De-energized loads that are not carried by a DG island.
  NodeSet unsupplied_loads;

  bool has_cycle() const noexcept { return !loop_edges.empty(); }
  NodeSet island_nodes() const;
  bool ok() const noexcept { return unsupplied_loads.empty() && (allow_loops || loop_edges.empty()); }
};

OperatingState validate_operating_state(const Topology& t, const SwitchVector& v, bool allow_loops);

}  // namespace gridsleuth
