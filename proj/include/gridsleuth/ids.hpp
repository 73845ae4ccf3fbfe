#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gridsleuth/errors.hpp"

namespace gridsleuth {

/// 1-based position in a canonical ordering. Tag keeps node and edge
/// indices from being mixed up.
template <typename Tag>
class Index {
 public:
  constexpr Index() = default;
  constexpr explicit Index(int one_based) : value_(one_based) {}

  static constexpr Index from_offset(std::size_t zero_based) {
    return Index(static_cast<int>(zero_based) + 1);
  }

  constexpr int value() const noexcept { return value_; }
  constexpr std::size_t offset() const noexcept { return static_cast<std::size_t>(value_ - 1); }

  friend constexpr auto operator<=>(Index, Index) = default;

 private:
  int value_ = 0;
};

using NodeId = Index<struct NodeTag>;
using EdgeId = Index<struct EdgeTag>;
using NodeSet = std::set<NodeId>;

/// Fixed-length 0/1 vector. The tag distinguishes the switch vector from the
/// node-indexed source, DG and energization vectors.
template <typename Tag>
class Flags {
 public:
  Flags() = default;
  explicit Flags(std::size_t size, bool value = false) : bits_(size, value ? 1 : 0) {}

  explicit Flags(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
      if (b > 1) throw Error(ErrorCode::InvalidSpec, "flag vector entries must be 0 or 1");
    }
  }

  /// Parses a string such as "1110111".
  static Flags parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c == '0' || c == '1') {
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
      } else if (c != ' ' && c != ',') {
        throw Error(ErrorCode::ParseError, "bad bit character '" + std::string(1, c) + "'");
      }
    }
    return Flags(std::move(bits));
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t offset) const { return bits_[offset] != 0; }
  template <typename IdTag>
  bool operator[](Index<IdTag> id) const {
    return bits_[id.offset()] != 0;
  }

  void set(std::size_t offset, bool value) { bits_[offset] = value ? 1 : 0; }
  template <typename IdTag>
  void set(Index<IdTag> id, bool value) {
    set(id.offset(), value);
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::string str() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) out.push_back(b ? '1' : '0');
    return out;
  }

  friend bool operator==(const Flags&, const Flags&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

using SwitchVector = Flags<struct SwitchTag>;
using SourceVector = Flags<struct SourceTag>;
using DgVector = Flags<struct DgTag>;
using EnergizationVector = Flags<struct EnergizedTag>;

}  // namespace gridsleuth
