#pragma once

#include <map>

#include "gridsleuth/ids.hpp"
#include "gridsleuth/matrix.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

struct EnergizationTrace {
  EnergizationVector energized;
  /// Passes of the update loop until two consecutive iterates agreed.
  std::size_t iterations = 0;
};

/// Fixed-point energization: start from the source vector and repeatedly add
/// every node adjacent to an energized one through a closed edge. Iterates are
/// binarized each pass so values stay in {0, 1}.
EnergizationTrace energize(const IncidenceMatrix& m, const SwitchVector& v, const SourceVector& s);

/// One update step, exposed for idempotence checks: binarize(prev * adjacency + prev).
EnergizationVector energization_step(const AdjacencyMatrix& a, const EnergizationVector& prev);

inline EnergizationVector energized_nodes(const IncidenceMatrix& m, const SwitchVector& v,
                                          const SourceVector& s) {
  return energize(m, v, s).energized;
}

/// Opens the alarming feeder breaker and energizes what is left. Zero entries
/// of the result are the suspect nodes. Throws NotABreaker or DimensionMismatch.
EnergizationVector feeder_trip_energization(const Topology& t, const IncidenceMatrix& m,
                                            const SwitchVector& v, const SourceVector& s,
                                            EdgeId alarm_breaker);

NodeSet zero_set(const EnergizationVector& vf);

/// Loads metered by each FRTU under a switch configuration: everything reached
/// from the breaker's load side through closed edges without passing a source.
/// Open breakers map to an empty set. Under a transient loop a node fed
/// through two breakers is credited to the lower breaker id.
std::map<EdgeId, NodeSet> feeder_zones(const Topology& t, const SwitchVector& v);

}  // namespace gridsleuth
