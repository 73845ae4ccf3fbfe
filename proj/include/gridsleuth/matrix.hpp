#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gridsleuth {

/// Dense row-major 0/1 matrix.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::size_t nonzeros() const noexcept {
    std::size_t n = 0;
    for (auto v : data_) n += v != 0;
    return n;
  }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

/// |V| x |E|; entry (i, j) is 1 iff node i is an endpoint of edge j.
struct IncidenceMatrix {
  BinaryMatrix entries;

  std::size_t node_count() const noexcept { return entries.rows(); }
  std::size_t edge_count() const noexcept { return entries.cols(); }
  friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;
};

/// |V| x |V|, symmetric, zero diagonal.
struct AdjacencyMatrix {
  BinaryMatrix entries;

  std::size_t node_count() const noexcept { return entries.rows(); }
  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;
};

}  // namespace gridsleuth
