#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridsleuth/ids.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

enum class SwitchOp { Open, Close };

/// One switch operation. Steps count from 1 across a plan; actions sharing a
/// group form one make-before-break unit (closes first, then opens) and only
/// the state after the last action of a group is a committed state.
struct SwitchingAction {
  EdgeId edge;
  SwitchOp action = SwitchOp::Open;
  int step = 0;
  int group = 0;

  friend bool operator==(const SwitchingAction&, const SwitchingAction&) = default;
};

/// Per-FRTU alarm source. Implementations must answer the same way when asked
/// twice about the same configuration within one episode.
class MeasurementOracle {
 public:
  virtual ~MeasurementOracle() = default;
  virtual bool alarm(const SwitchVector& v, EdgeId breaker) = 0;
};

struct FrtuCheck {
  EdgeId breaker;
  bool alarm = false;
  /// Number of switching actions executed before this check.
  int after_step = 0;
  NodeSet zone;
};

/// Suspect set recorded while chasing one alarming FRTU.
struct SuspectStep {
  EdgeId frtu;
  NodeSet nodes;
};

struct Island {
  NodeSet nodes;
  /// Boundary edges opened to cut the island loose.
  std::vector<EdgeId> opened;
  /// Edge that joins the island back to the feeder it was taken from.
  std::optional<EdgeId> reconnect;
};

struct IsolationPlan {
  SwitchVector state;
  std::vector<Island> islands;
  std::vector<SwitchingAction> actions;
};

/// Cuts every energized DG cluster away from its source by opening its
/// boundary edges. Loads stranded by those openings are picked up first by
/// closing open ties (lowest id first). Throws InfeasibleIsolation when a
/// stranded load cannot be re-fed.
IsolationPlan isolate_dg_islands(const Topology& t, const SwitchVector& v, const DgVector& g);

struct RestorationFragment {
  SwitchVector state;
  std::vector<SwitchingAction> actions;
  std::vector<FrtuCheck> checks;
  /// The alarming FRTU was still alarming under isolation; nothing restored.
  bool skipped = false;
  /// Index into the island list of the island whose return raised an alarm.
  std::optional<std::size_t> culprit;
  NodeSet suspects;
  std::vector<std::string> log;
};

/// Checks the alarming FRTU under isolation; when it reads normal, brings the
/// islands back one at a time and checks the FRTU that picks each one up.
/// Throws OracleInconsistent when no island raises the alarm.
RestorationFragment sequential_restoration(const Topology& t, const SwitchVector& v, const std::vector<Island>& islands,
                                           EdgeId alarm_breaker, MeasurementOracle& oracle);

struct LocalizationReport {
  EdgeId alarm;
  SwitchVector initial_state;
  SwitchVector final_state;
  std::vector<Island> islands;
  std::vector<SwitchingAction> actions;
  std::vector<FrtuCheck> checks;
  std::vector<SuspectStep> suspect_history;
  NodeSet final_suspects;
  /// Suspects never exonerated nor confirmed (for example a DG island that was
  /// not needed to explain any alarm).
  NodeSet unresolved;
  /// Some suspect set could not be split further by any feasible switching.
  bool irreducible = false;
  /// The alarm vanished once DG islands were cut loose.
  bool cleared_by_isolation = false;
  std::vector<std::string> constraint_violations;
  std::vector<std::string> log;
};

/// Full localization episode for one alarming feeder breaker.
/// Throws NotABreaker, DimensionMismatch, InfeasiblePlan or OracleInconsistent.
LocalizationReport localize(const Topology& t, const SwitchVector& v0, const SourceVector& s, const DgVector& g,
                            EdgeId alarm_breaker, MeasurementOracle& oracle);
/// Same, when other FRTUs were alarming in v0 as well. Loads behind them are
/// not presumed clean: a check covering any of them counts only when it reads
/// clear, and no transfer moves them under the FRTU being narrowed.
LocalizationReport localize(const Topology& t, const SwitchVector& v0, const SourceVector& s, const DgVector& g,
                            EdgeId alarm_breaker, MeasurementOracle& oracle, const std::vector<EdgeId>& concurrent);

std::string format_nodes(const Topology& t, const NodeSet& nodes);

}  // namespace gridsleuth
