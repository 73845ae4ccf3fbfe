#include "gridsleuth/metering.hpp"

#include <cmath>
#include <random>

#include "gridsleuth/energization.hpp"

namespace gridsleuth {

const FrtuReading* MeterInterval::find_frtu(std::string_view name) const {
  for (const auto& f : frtus) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

void check_meters(const Topology& t, const std::vector<CustomerMeter>& meters) {
  for (const auto& m : meters) {
    if (m.node.value() < 1 || m.node.offset() >= t.node_count()) {
      throw Error(ErrorCode::UnknownNode, "meter '" + m.meter_id + "' sits on an unknown node");
    }
    if (!t.is_load(m.node)) {
      throw Error(ErrorCode::UnknownNode, "meter '" + m.meter_id + "' sits on source node '" + t.node(m.node).label + "'");
    }
    if (!(m.base_load >= 0.0)) throw Error(ErrorCode::InvalidSpec, "meter '" + m.meter_id + "' has negative base load");
  }
}

namespace {

std::optional<double> apply_tamper(const TamperMode& mode, double true_kwh) {
  struct Visitor {
    double x;
    std::optional<double> operator()(const NoTamper&) const { return x; }
    std::optional<double> operator()(const ScaleTamper& s) const { return s.alpha * x; }
    std::optional<double> operator()(const FixedTamper& f) const { return f.kwh; }
    std::optional<double> operator()(const OutageTamper&) const { return std::nullopt; }
  };
  return std::visit(Visitor{true_kwh}, mode);
}

}  // namespace

MeterInterval simulate_interval(const Topology& t, const SwitchVector& v, const std::vector<CustomerMeter>& meters,
                                const SimConfig& config, std::uint64_t seed, int interval_index) {
  if (v.size() != t.edge_count()) {
    throw Error(ErrorCode::InvalidSwitchVector, "switch vector has " + std::to_string(v.size()) + " entries, expected " +
                                                    std::to_string(t.edge_count()));
  }
  check_meters(t, meters);

  const auto state = validate_operating_state(t, v, true);
  const auto zones = feeder_zones(t, v);
  std::vector<std::optional<EdgeId>> metered_by(t.node_count());
  for (const auto& [breaker, zone] : zones) {
    for (NodeId n : zone) metered_by[n.offset()] = breaker;
  }

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(interval_index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MeterInterval out;
  out.interval_index = interval_index;
  std::map<EdgeId, double> true_sum;
  for (const auto& m : meters) {
    // Two draws per meter in a fixed order keep the stream aligned across configurations.
    const double noise_draw = unit(rng);
    const double tamper_draw = unit(rng);

    MeterReading r;
    r.meter_id = m.meter_id;
    r.node = m.node;
    r.frtu = metered_by[m.node.offset()];
    const bool supplied = !state.unsupplied_loads.contains(m.node);
    r.true_kwh = supplied ? m.base_load * (1.0 + config.noise * (2.0 * noise_draw - 1.0)) : 0.0;

    const bool active = interval_index >= m.schedule.start_interval && tamper_draw < m.schedule.probability &&
                        !std::holds_alternative<NoTamper>(m.tamper);
    r.tampered = active;
    r.reported_kwh = active ? apply_tamper(m.tamper, r.true_kwh) : std::optional<double>(r.true_kwh);
    if (r.frtu) true_sum[*r.frtu] += r.true_kwh;
    out.readings.push_back(std::move(r));
  }

  for (const auto& f : t.frtus()) {
    FrtuReading fr{f.breaker, f.name, true_sum[f.breaker] * (1.0 + config.loss_factor), zones.at(f.breaker)};
    out.frtus.push_back(std::move(fr));
  }
  return out;
}

double feeder_discrepancy(const MeterInterval& interval, std::string_view frtu) {
  const FrtuReading* f = interval.find_frtu(frtu);
  if (f == nullptr) throw Error(ErrorCode::UnknownFrtu, "no FRTU named '" + std::string(frtu) + "' in interval");
  double reported = 0.0;
  for (const auto& r : interval.readings) {
    if (r.frtu == f->breaker && r.reported_kwh) reported += *r.reported_kwh;
  }
  if (f->aggregate_kwh == 0.0 && reported != 0.0) {
    throw Error(ErrorCode::ZeroAggregateWithNonzeroReports,
                "FRTU '" + f->name + "' measures zero while its meters report " + std::to_string(reported) + " kWh");
  }
  return discrepancy_ratio(f->aggregate_kwh, reported);
}

double discrepancy_ratio(double aggregate_kwh, double reported_kwh) {
  if (aggregate_kwh == 0.0) {
    if (reported_kwh == 0.0) return 0.0;
    throw Error(ErrorCode::ZeroAggregateWithNonzeroReports,
                "aggregate is zero while meters report " + std::to_string(reported_kwh) + " kWh");
  }
  return std::abs(aggregate_kwh - reported_kwh) / aggregate_kwh;
}

bool detect(double ratio, double threshold) {
  if (std::abs(ratio - threshold) <= 1e-9 * std::abs(threshold)) return false;
  return ratio > threshold;
}

}  // namespace gridsleuth
