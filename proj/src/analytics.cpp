#include "gridsleuth/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "gridsleuth/errors.hpp"

namespace gridsleuth {

AnomalyScore anomaly_score(std::int64_t n_anomalous, std::int64_t n_total) {
  if (n_anomalous < 0 || n_total < 0 || n_anomalous > n_total) {
    throw Error(ErrorCode::CountOutOfRange,
                std::to_string(n_anomalous) + " anomalous of " + std::to_string(n_total) + " readings");
  }
  AnomalyScore s;
  s.n_anomalous = n_anomalous;
  s.n_total = n_total;
  s.value = n_total == 0 ? 0.0 : static_cast<double>(n_anomalous) / static_cast<double>(n_total);
  return s;
}

AlarmProbability alarm_probability(std::span<const double> qs) {
  AlarmProbability p;
  p.components.assign(qs.begin(), qs.end());
  double none = 1.0;
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::ProbabilityOutOfRange, "alarm type probability " + std::to_string(q));
    none *= 1.0 - q;
  }
  p.value = 1.0 - none;
  return p;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyHistory, "median of an empty series");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

bool deviates(double reading, double reference, double threshold) {
  if (reference == 0.0) return reading != 0.0;
  return std::abs(reading - reference) / reference > threshold;
}

}  // namespace

std::int64_t flag_profile(const ConsumptionProfile& p, double deviation_threshold) {
  if (p.historical.empty()) throw Error(ErrorCode::EmptyHistory, "meter '" + p.meter_id + "' has no history");
  if (!(deviation_threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "deviation threshold must be positive");
  const double reference = median(p.historical);
  return std::count_if(p.current.begin(), p.current.end(),
                       [&](double x) { return deviates(x, reference, deviation_threshold); });
}

std::vector<double> alarm_type_frequencies(const std::vector<std::vector<bool>>& occurrences) {
  std::vector<double> freq;
  if (occurrences.empty()) return freq;
  freq.assign(occurrences.front().size(), 0.0);
  for (const auto& row : occurrences) {
    if (row.size() != freq.size()) throw Error(ErrorCode::DimensionMismatch, "ragged alarm occurrence table");
    for (std::size_t m = 0; m < row.size(); ++m) freq[m] += row[m] ? 1.0 : 0.0;
  }
  for (double& f : freq) f /= static_cast<double>(occurrences.size());
  return freq;
}

std::vector<MeterScore> rank_meters(NodeId node, std::vector<MeterScore> meters) {
  for (const auto& m : meters) {
    if (m.node != node) {
      throw Error(ErrorCode::MeterNotOnNode, "meter '" + m.meter_id + "' is not on node " + std::to_string(node.value()));
    }
  }
  std::sort(meters.begin(), meters.end(), [](const MeterScore& a, const MeterScore& b) {
    const double ia = a.index();
    const double ib = b.index();
    if (ia != ib) return ia > ib;
    return a.meter_id < b.meter_id;
  });
  return meters;
}

std::vector<MeterScore> score_node(NodeId node, const std::vector<MeterHistory>& meters, const ScoringOptions& options) {
  std::vector<MeterScore> scored;
  for (const auto& m : meters) {
    if (m.node != node) continue;
    ConsumptionProfile profile{m.meter_id, {}, {}};
    std::vector<std::vector<bool>> occurrences;
    std::int64_t outages = 0;
    for (std::size_t i = 0; i < m.reported.size(); ++i) {
      if (i < options.history_intervals) {
        if (m.reported[i]) profile.historical.push_back(*m.reported[i]);
      } else if (m.reported[i]) {
        profile.current.push_back(*m.reported[i]);
      } else {
        ++outages;
      }
    }
    if (profile.historical.empty()) throw Error(ErrorCode::EmptyHistory, "meter '" + m.meter_id + "' has no history");

    const double reference = median(profile.historical);
    for (std::size_t i = options.history_intervals; i < m.reported.size(); ++i) {
      const bool missing = !m.reported[i];
      const bool deviation = !missing && deviates(*m.reported[i], reference, options.deviation_threshold);
      occurrences.push_back({deviation, missing});
    }
    const std::int64_t deviations = flag_profile(profile, options.deviation_threshold);
    const auto total = static_cast<std::int64_t>(occurrences.size());
    const auto q = alarm_type_frequencies(occurrences);
    scored.push_back(MeterScore{m.meter_id, m.node, anomaly_score(deviations + outages, total), alarm_probability(q)});
  }
  return rank_meters(node, std::move(scored));
}

}  // namespace gridsleuth
