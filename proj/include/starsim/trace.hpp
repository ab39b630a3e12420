#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "starsim/address.hpp"

namespace starsim {

enum class TraceOp : std::uint8_t { Load, Store, SpecBegin, SpecEnd, DomainSwitch, Comment };

/// One trace line. Grammar (one event per line, blank lines ignored):
///
///   L <hex-addr> [domain]
///   S <hex-addr> [domain] [byte-value]
///   SPEC_BEGIN
///   SPEC_END commit|squash
///   DOMAIN_SWITCH <domain>
///   # free text
///
/// Addresses are hexadecimal with an optional 0x prefix and must be below
/// 2^48. Domains are decimal. A missing domain means the current one, set by
/// DOMAIN_SWITCH (initially 0). Store values are decimal or 0x-hex bytes and
/// default to 0. SPEC windows do not nest.
struct TraceEvent {
  TraceOp op = TraceOp::Comment;
  Address addr;
  std::optional<DomainId> domain;
  std::uint8_t value = 0;
  /// SPEC_END only.
  bool squash = false;
  std::string comment;
  std::size_t line = 0;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Throws TraceParseError naming the offending line.
std::vector<TraceEvent> parse_trace(std::string_view text, unsigned domain_bits = 8);

std::string format_trace(const std::vector<TraceEvent>& events);

std::vector<TraceEvent> read_trace_file(const std::string& path, unsigned domain_bits = 8);

}  // namespace starsim
