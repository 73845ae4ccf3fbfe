#include "gridsleuth/scenario_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gridsleuth/errors.hpp"
#include "gridsleuth/report_io.hpp"
#include "gridsleuth/topology_io.hpp"

namespace gridsleuth {

namespace {

using nlohmann::json;

std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorCode::ParseError, "node reference must be a string or an integer");
}

NodeId resolve(const Topology& t, const json& j) {
  const std::string label = label_of(j);
  auto id = t.find_node(label);
  if (!id) throw Error(ErrorCode::UnknownNode, "no node '" + label + "'");
  return *id;
}

std::pair<TamperMode, TamperSchedule> parse_tamper(const json& j) {
  TamperSchedule schedule;
  if (j.is_null()) return {NoTamper{}, schedule};
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "tamper must be an object");
  schedule.probability = j.value("probability", 1.0);
  schedule.start_interval = j.value("start", 0);
  if (!(schedule.probability >= 0.0 && schedule.probability <= 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "tamper probability must lie in [0, 1]");
  }
  const std::string kind = j.value("kind", std::string("none"));
  if (kind == "none") return {NoTamper{}, schedule};
  if (kind == "scale") {
    const double alpha = j.at("alpha").get<double>();
    if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidSpec, "scale tamper needs alpha >= 0");
    return {ScaleTamper{alpha}, schedule};
  }
  if (kind == "fixed") return {FixedTamper{j.at("kwh").get<double>()}, schedule};
  if (kind == "outage") return {OutageTamper{}, schedule};
  throw Error(ErrorCode::ParseError, "unknown tamper kind '" + kind + "'");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir, std::string name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "scenario must be a JSON object");

  Scenario sc;
  try {
    sc.name = doc.value("name", name);
    auto topo = doc.find("topology");
    if (topo == doc.end()) throw Error(ErrorCode::ParseError, "scenario has no topology");
    if (topo->is_string()) {
      sc.topology = load_topology(base_dir / topo->get<std::string>());
    } else {
      sc.topology = build_topology(parse_topology_spec(topo->dump()));
    }

    sc.sim.noise = doc.value("noise", 0.0);
    sc.sim.loss_factor = doc.value("loss_factor", 0.0);
    sc.seed = doc.value("seed", std::uint64_t{0});
    sc.threshold = doc.value("threshold", kDefaultThreshold);
    sc.intervals = doc.value("intervals", 1);
    if (!(sc.threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "threshold must be positive");
    if (!(sc.sim.noise >= 0.0 && sc.sim.noise < 1.0)) throw Error(ErrorCode::InvalidSpec, "noise must lie in [0, 1)");
    if (sc.intervals < 1) throw Error(ErrorCode::InvalidSpec, "intervals must be at least 1");

    if (auto sw = doc.find("switches"); sw != doc.end() && !sw->is_null()) {
      sc.switches = SwitchVector::parse(sw->get<std::string>());
      if (sc.switches->size() != sc.topology.edge_count()) {
        throw Error(ErrorCode::InvalidSwitchVector, "switch string length does not match the edge count");
      }
    }
    for (const json& m : doc.value("meters", json::array())) {
      CustomerMeter meter;
      meter.meter_id = label_of(m.at("id"));
      meter.node = resolve(sc.topology, m.at("node"));
      meter.base_load = m.at("base_load").get<double>();
      auto [mode, schedule] = parse_tamper(m.value("tamper", json()));
      meter.tamper = mode;
      meter.schedule = schedule;
      sc.meters.push_back(std::move(meter));
    }
    if (auto gt = doc.find("ground_truth"); gt != doc.end() && !gt->is_null()) {
      NodeSet truth;
      for (const json& n : *gt) truth.insert(resolve(sc.topology, n));
      sc.ground_truth = truth;
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  check_meters(sc.topology, sc.meters);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(slurp(path), path.parent_path(), path.stem().string());
}

void write_interval_header(std::ostream& out) {
  out << "interval,meter_id,node,true_kwh,reported_kwh,frtu,frtu_kwh\n";
}

void write_interval_rows(std::ostream& out, const Topology& t, const MeterInterval& interval) {
  for (const auto& r : interval.readings) {
    out << interval.interval_index << ',' << r.meter_id << ',' << t.node(r.node).label << ','
        << format_number(r.true_kwh) << ',';
    if (r.reported_kwh) out << format_number(*r.reported_kwh);
    out << ',';
    if (r.frtu) {
      const FrtuReading* f = interval.find_frtu(t.frtu(*r.frtu).name);
      out << f->name << ',' << format_number(f->aggregate_kwh);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + s + "' is not a number");
}

}  // namespace

std::vector<HistoryRecord> read_history_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "history file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"interval", "meter_id", "node", "reported_kwh"}) {
    if (!col.contains(need)) throw Error(ErrorCode::ParseError, std::string("history header lacks '") + need + "'");
  }

  std::vector<HistoryRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                             " cells, expected " + std::to_string(header.size()));
    }
    HistoryRecord r;
    const double interval = parse_double(cells[col["interval"]], line_no);
    if (interval < 0 || interval != static_cast<double>(static_cast<int>(interval))) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad interval index");
    }
    r.interval = static_cast<int>(interval);
    r.meter_id = cells[col["meter_id"]];
    r.node = cells[col["node"]];
    if (r.meter_id.empty() || r.node.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty meter or node");
    }
    const std::string& rep = cells[col["reported_kwh"]];
    if (!rep.empty()) r.reported_kwh = parse_double(rep, line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MeterHistory> histories_for_node(const std::vector<HistoryRecord>& records, std::string_view node,
                                             NodeId node_id) {
  int last_interval = -1;
  for (const auto& r : records) last_interval = std::max(last_interval, r.interval);

  std::map<std::string, MeterHistory> by_meter;
  for (const auto& r : records) {
    if (r.node != node) continue;
    auto& h = by_meter[r.meter_id];
    if (h.meter_id.empty()) {
      h.meter_id = r.meter_id;
      h.node = node_id;
      h.reported.assign(static_cast<std::size_t>(last_interval + 1), std::nullopt);
    }
    h.reported[static_cast<std::size_t>(r.interval)] = r.reported_kwh;
  }
  std::vector<MeterHistory> out;
  for (auto& [id, h] : by_meter) out.push_back(std::move(h));
  return out;
}

}  // namespace gridsleuth
