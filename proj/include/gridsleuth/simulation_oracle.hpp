#pragma once

#include <cstdint>
#include <vector>

#include "gridsleuth/metering.hpp"
#include "gridsleuth/planner.hpp"

namespace gridsleuth {

/// Answers FRTU checks by simulating one interval under the requested
/// configuration and thresholding that feeder's discrepancy. The interval and
/// seed are fixed, so repeated questions get repeated answers.
class SimulationOracle : public MeasurementOracle {
 public:
  SimulationOracle(const Topology& t, std::vector<CustomerMeter> meters, SimConfig config, std::uint64_t seed,
                   double threshold, int interval_index = 0);

  bool alarm(const SwitchVector& v, EdgeId breaker) override;
  /// FRTUs alarming under a configuration, ascending breaker id.
  std::vector<EdgeId> alarms(const SwitchVector& v);
  int queries() const noexcept { return queries_; }

 private:
  bool flagged(const MeterInterval& interval, const FrtuReading& f) const;

  const Topology& t_;
  std::vector<CustomerMeter> meters_;
  SimConfig config_;
  std::uint64_t seed_;
  double threshold_;
  int interval_;
  int queries_ = 0;
};

}  // namespace gridsleuth
