#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridsleuth/ids.hpp"

namespace gridsleuth {

/// Share of anomalous readings in a window.
struct AnomalyScore {
  double value = 0.0;
  std::int64_t n_anomalous = 0;
  std::int64_t n_total = 0;
};

/// Chance that at least one alarm type fires: 1 - prod(1 - q) over alarm types.
struct AlarmProbability {
  double value = 0.0;
  std::vector<double> components;
};

struct ConsumptionProfile {
  std::string meter_id;
  std::vector<double> historical;
  std::vector<double> current;
};

/// n_total == 0 gives a score of 0. Throws CountOutOfRange.
AnomalyScore anomaly_score(std::int64_t n_anomalous, std::int64_t n_total);

/// Empty input gives 0. Throws ProbabilityOutOfRange.
AlarmProbability alarm_probability(std::span<const double> qs);

double median(std::vector<double> values);

/// Number of current intervals deviating from the historical median by more
/// than the given fraction. Throws EmptyHistory.
std::int64_t flag_profile(const ConsumptionProfile& p, double deviation_threshold);

inline constexpr double kDefaultDeviationThreshold = 0.3;

/// Empirical frequency of each alarm type over a window: rows are intervals,
/// columns alarm types.
std::vector<double> alarm_type_frequencies(const std::vector<std::vector<bool>>& occurrences);

struct MeterScore {
  std::string meter_id;
  NodeId node;
  AnomalyScore score;
  AlarmProbability probability;

  double index() const noexcept { return score.value * probability.value; }
};

/// Descending by score * probability, ties by meter id. Throws MeterNotOnNode.
std::vector<MeterScore> rank_meters(NodeId node, std::vector<MeterScore> meters);

/// Interval history of one meter; absent entries are missing reports.
struct MeterHistory {
  std::string meter_id;
  NodeId node;
  std::vector<std::optional<double>> reported;  // indexed by interval
};

struct ScoringOptions {
  std::size_t history_intervals = 0;  // intervals [0, history) form the archive
  double deviation_threshold = kDefaultDeviationThreshold;
};

/// Scores every meter of one node against its own archive. Alarm types are
/// profile deviation and missing report; the score counts intervals with either.
std::vector<MeterScore> score_node(NodeId node, const std::vector<MeterHistory>& meters, const ScoringOptions& options);

}  // namespace gridsleuth
