#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridsleuth/ids.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

struct NoTamper {};
/// Reported = alpha * true. alpha < 1 under-reports, alpha > 1 inflates.
struct ScaleTamper {
  double alpha = 1.0;
};
/// Reported = constant kWh regardless of consumption.
struct FixedTamper {
  double kwh = 0.0;
};
/// Meter stops reporting.
struct OutageTamper {};

using TamperMode = std::variant<NoTamper, ScaleTamper, FixedTamper, OutageTamper>;

/// When a tamper is active: from start_interval on, in each interval with the
/// given probability.
struct TamperSchedule {
  double probability = 1.0;
  int start_interval = 0;
};

struct CustomerMeter {
  std::string meter_id;
  NodeId node;
  double base_load = 0.0;  // kWh per interval
  TamperMode tamper = NoTamper{};
  TamperSchedule schedule;
};

struct SimConfig {
  double noise = 0.0;        // multiplicative uniform noise half-width
  double loss_factor = 0.0;  // FRTU aggregate = sum(true) * (1 + loss_factor)
};

struct MeterReading {
  std::string meter_id;
  NodeId node;
  double true_kwh = 0.0;
  std::optional<double> reported_kwh;  // empty for an outage
  bool tampered = false;
  std::optional<EdgeId> frtu;  // breaker whose FRTU meters this node, if any
};

struct FrtuReading {
  EdgeId breaker;
  std::string name;
  double aggregate_kwh = 0.0;
  NodeSet zone;
};

struct MeterInterval {
  int interval_index = 0;
  std::vector<MeterReading> readings;
  std::vector<FrtuReading> frtus;  // ordered by breaker id

  const FrtuReading* find_frtu(std::string_view name) const;
};

/// Validates the meter list against the topology: every meter sits on a load.
void check_meters(const Topology& t, const std::vector<CustomerMeter>& meters);

/// One billing interval. Deterministic in (seed, interval_index).
/// Throws UnknownNode or InvalidSwitchVector.
MeterInterval simulate_interval(const Topology& t, const SwitchVector& v, const std::vector<CustomerMeter>& meters,
                                const SimConfig& config, std::uint64_t seed, int interval_index = 0);

/// |aggregate - reported| / aggregate; 0 when both are 0.
double discrepancy_ratio(double aggregate_kwh, double reported_kwh);

/// |aggregate - sum(reported)| / aggregate over the FRTU's zone.
/// Throws UnknownFrtu or ZeroAggregateWithNonzeroReports.
double feeder_discrepancy(const MeterInterval& interval, std::string_view frtu);

inline constexpr double kDefaultThreshold = 0.20;

/// Strictly above threshold. Ratios within 1e-9 (relative) of the threshold
/// count as sitting on it, so floating-point residue cannot raise an alarm.
bool detect(double ratio, double threshold = kDefaultThreshold);

}  // namespace gridsleuth
