#include "gridsleuth/simulation_oracle.hpp"

#include "gridsleuth/errors.hpp"

namespace gridsleuth {

bool SimulationOracle::flagged(const MeterInterval& interval, const FrtuReading& f) const {
  try {
    return detect(feeder_discrepancy(interval, f.name), threshold_);
  } catch (const Error& e) {
    // Meters billing energy the feeder never delivered is itself a discrepancy.
    if (e.code() == ErrorCode::ZeroAggregateWithNonzeroReports) return true;
    throw;
  }
}

SimulationOracle::SimulationOracle(const Topology& t, std::vector<CustomerMeter> meters, SimConfig config,
                                   std::uint64_t seed, double threshold, int interval_index)
    : t_(t), meters_(std::move(meters)), config_(config), seed_(seed), threshold_(threshold), interval_(interval_index) {}

bool SimulationOracle::alarm(const SwitchVector& v, EdgeId breaker) {
  ++queries_;
  const MeterInterval interval = simulate_interval(t_, v, meters_, config_, seed_, interval_);
  const FrtuReading* f = interval.find_frtu(t_.frtu(breaker).name);
  if (f == nullptr || f->zone.empty()) return false;
  return flagged(interval, *f);
}

std::vector<EdgeId> SimulationOracle::alarms(const SwitchVector& v) {
  const MeterInterval interval = simulate_interval(t_, v, meters_, config_, seed_, interval_);
  std::vector<EdgeId> out;
  for (const auto& f : interval.frtus) {
    if (!f.zone.empty() && flagged(interval, f)) out.push_back(f.breaker);
  }
  return out;
}

}  // namespace gridsleuth
