#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridsleuth/analytics.hpp"
#include "gridsleuth/metering.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

struct Scenario {
  std::string name;
  Topology topology;
  std::vector<CustomerMeter> meters;
  SimConfig sim;
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
  /// Operating configuration; the normal state when absent.
  std::optional<SwitchVector> switches;
  /// Nodes that really carry a tampered meter.
  std::optional<NodeSet> ground_truth;
  int intervals = 1;

  SwitchVector operating_state() const { return switches ? *switches : topology.normal_state(); }
};

/// `topology` is either an inline object or a path relative to base_dir.
/// Throws ParseError for malformed input and the topology/metering errors for
/// inconsistent content.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir, std::string name);
Scenario load_scenario(const std::filesystem::path& path);

/// Interval CSV: interval,meter_id,node,true_kwh,reported_kwh,frtu,frtu_kwh.
/// A missing report is an empty reported_kwh cell.
void write_interval_header(std::ostream& out);
void write_interval_rows(std::ostream& out, const Topology& t, const MeterInterval& interval);

struct HistoryRecord {
  int interval = 0;
  std::string meter_id;
  std::string node;
  std::optional<double> reported_kwh;
};

/// Reads the interval CSV (only interval, meter_id, node and reported_kwh are
/// used). Throws ParseError.
std::vector<HistoryRecord> read_history_csv(std::istream& in);

/// Groups the records of one node by meter; missing intervals read as outages.
std::vector<MeterHistory> histories_for_node(const std::vector<HistoryRecord>& records, std::string_view node,
                                             NodeId node_id);

}  // namespace gridsleuth
