#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridsleuth/matrix.hpp"
#include "gridsleuth/topology.hpp"

namespace gridsleuth {

/// Parses the JSON network description. Node and edge ids may be numbers or
/// strings. Throws ParseError on malformed documents.
TopologySpec parse_topology_spec(std::string_view json_text);
TopologySpec read_topology_spec(const std::filesystem::path& path);
Topology load_topology(const std::filesystem::path& path);

std::vector<std::string> node_labels(const Topology& t);
std::vector<std::string> edge_labels(const Topology& t);

/// Dense CSV: a header cell per column (first cell empty), then one labelled
/// row per matrix row.
void write_dense_csv(std::ostream& out, const BinaryMatrix& m, const std::vector<std::string>& row_labels,
                     const std::vector<std::string>& col_labels);
/// Coordinate listing `row,col,value` of the nonzero entries, 1-based.
void write_sparse_csv(std::ostream& out, const BinaryMatrix& m);
/// Inverse of write_dense_csv. Throws ParseError.
BinaryMatrix read_dense_csv(std::istream& in);

}  // namespace gridsleuth
