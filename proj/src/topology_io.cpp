#include "gridsleuth/topology_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridsleuth/errors.hpp"

namespace gridsleuth {

namespace {

using nlohmann::json;

std::string id_of(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorCode::ParseError, std::string(what) + " must be a string or an integer");
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return *it;
}

NodeKind node_kind(const std::string& s) {
  if (s == "source") return NodeKind::SubstationSource;
  if (s == "load") return NodeKind::Load;
  throw Error(ErrorCode::ParseError, "unknown node kind '" + s + "'");
}

SwitchKind switch_kind(const std::string& s) {
  if (s == "breaker") return SwitchKind::FeederBreaker;
  if (s == "sectionalizer") return SwitchKind::Sectionalizer;
  if (s == "tie") return SwitchKind::TieSwitch;
  throw Error(ErrorCode::ParseError, "unknown edge kind '" + s + "'");
}

TopologySpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "topology must be a JSON object");
  const json& nodes = field(doc, "nodes");
  const json& edges = field(doc, "edges");
  if (!nodes.is_array() || !edges.is_array()) throw Error(ErrorCode::ParseError, "'nodes' and 'edges' must be arrays");

  TopologySpec spec;
  try {
    for (const json& n : nodes) {
      NodeSpec ns;
      ns.id = id_of(field(n, "id"), "node id");
      ns.kind = node_kind(field(n, "kind").get<std::string>());
      ns.dg = n.value("dg", false);
      spec.nodes.push_back(std::move(ns));
    }
    for (const json& e : edges) {
      EdgeSpec es;
      es.id = id_of(field(e, "id"), "edge id");
      es.kind = switch_kind(field(e, "kind").get<std::string>());
      es.from = id_of(field(e, "from"), "edge endpoint");
      es.to = id_of(field(e, "to"), "edge endpoint");
      if (auto it = e.find("frtu"); it != e.end() && !it->is_null()) es.frtu = it->get<std::string>();
      spec.edges.push_back(std::move(es));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  return spec;
}

}  // namespace

TopologySpec parse_topology_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  return spec_from_json(doc);
}

TopologySpec read_topology_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_topology_spec(buf.str());
}

Topology load_topology(const std::filesystem::path& path) { return build_topology(read_topology_spec(path)); }

std::vector<std::string> node_labels(const Topology& t) {
  std::vector<std::string> out;
  for (const auto& n : t.nodes()) out.push_back(n.label);
  return out;
}

std::vector<std::string> edge_labels(const Topology& t) {
  std::vector<std::string> out;
  for (const auto& e : t.edges()) out.push_back(e.label);
  return out;
}

void write_dense_csv(std::ostream& out, const BinaryMatrix& m, const std::vector<std::string>& row_labels,
                     const std::vector<std::string>& col_labels) {
  if (row_labels.size() != m.rows() || col_labels.size() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match matrix shape");
  }
  for (const auto& c : col_labels) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << row_labels[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << static_cast<int>(m(r, c));
    out << '\n';
  }
}

void write_sparse_csv(std::ostream& out, const BinaryMatrix& m) {
  out << "row,col,value\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0) out << r + 1 << ',' << c + 1 << ',' << static_cast<int>(m(r, c)) << '\n';
    }
  }
}

BinaryMatrix read_dense_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty matrix file");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<std::uint8_t>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // row label
    std::vector<std::uint8_t> row;
    while (std::getline(cells, cell, ',')) {
      if (cell != "0" && cell != "1") throw Error(ErrorCode::ParseError, "matrix entry '" + cell + "' is not 0 or 1");
      row.push_back(cell == "1" ? 1 : 0);
    }
    if (row.size() != cols) throw Error(ErrorCode::ParseError, "ragged matrix row");
    rows.push_back(std::move(row));
  }
  BinaryMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace gridsleuth
