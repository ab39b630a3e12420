#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "starsim/address.hpp"

namespace starsim {

/// Backing store for simulated line contents. Lines never written read as
/// zero, and reads never create entries.
class FlatMemory {
 public:
  explicit FlatMemory(std::uint32_t line_size_bytes = 64) : line_size_(line_size_bytes) {}

  std::uint32_t line_size() const noexcept { return line_size_; }

  /// `line` must be line-aligned; `out` must be line_size() bytes.
  void read_line(Address line, std::span<std::uint8_t> out) const;
  void write_line(Address line, std::span<const std::uint8_t> in);

  /// Byte-granular helpers used by reference models and tests.
  void write_bytes(Address addr, std::span<const std::uint8_t> bytes);
  std::uint8_t read_byte(Address addr) const;

  std::size_t lines_written() const noexcept { return lines_.size(); }

  /// Equality on contents: an explicitly written all-zero line equals an
  /// unwritten one.
  bool same_contents(const FlatMemory& other) const;

 private:
  std::uint32_t line_size_;
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> lines_;
};

}  // namespace starsim
