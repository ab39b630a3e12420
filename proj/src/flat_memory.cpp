#include "starsim/flat_memory.hpp"

#include <algorithm>
#include <stdexcept>

namespace starsim {

namespace {

bool all_zero(const std::vector<std::uint8_t>& v) {
  return std::all_of(v.begin(), v.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

void FlatMemory::read_line(Address line, std::span<std::uint8_t> out) const {
  if (out.size() != line_size_) throw std::invalid_argument("read_line: buffer is not one line");
  const auto it = lines_.find(line.value());
  if (it == lines_.end()) {
    std::fill(out.begin(), out.end(), std::uint8_t{0});
  } else {
    std::copy(it->second.begin(), it->second.end(), out.begin());
  }
}

void FlatMemory::write_line(Address line, std::span<const std::uint8_t> in) {
  if (in.size() != line_size_) throw std::invalid_argument("write_line: buffer is not one line");
  auto& stored = lines_[line.value()];
  stored.assign(in.begin(), in.end());
}

void FlatMemory::write_bytes(Address addr, std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint64_t a = addr.value() + i;
    const std::uint64_t base = a & ~std::uint64_t{line_size_ - 1};
    auto& stored = lines_[base];
    if (stored.empty()) stored.assign(line_size_, 0);
    stored[a - base] = bytes[i];
  }
}

std::uint8_t FlatMemory::read_byte(Address addr) const {
  const std::uint64_t base = addr.value() & ~std::uint64_t{line_size_ - 1};
  const auto it = lines_.find(base);
  return it == lines_.end() ? 0 : it->second[addr.value() - base];
}

bool FlatMemory::same_contents(const FlatMemory& other) const {
  if (line_size_ != other.line_size_) return false;
  auto covered = [](const FlatMemory& a, const FlatMemory& b) {
    for (const auto& [addr, bytes] : a.lines_) {
      const auto it = b.lines_.find(addr);
      if (it == b.lines_.end()) {
        if (!all_zero(bytes)) return false;
      } else if (it->second != bytes) {
        return false;
      }
    }
    return true;
  };
  return covered(*this, other) && covered(other, *this);
}

}  // namespace starsim
