#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "starsim/address.hpp"

namespace starsim {

using RequestId = std::uint64_t;

enum class MemOp : std::uint8_t { Load, Store, Flush };

/// A typed access. Stores and flushes are never speculative.
struct MemoryRequest {
  MemOp op = MemOp::Load;
  Address addr;
  DomainId domain;
  bool spec_bit = false;
  /// Provenance of the request (window entry id); 0 when untracked.
  RequestId id = 0;

  static MemoryRequest load(Address a, DomainId d, bool spec = false, RequestId id = 0) {
    return {MemOp::Load, a, d, spec, id};
  }
  static MemoryRequest store(Address a, DomainId d, RequestId id = 0) { return {MemOp::Store, a, d, false, id}; }
};

/// Fixed-capacity line payload so responses never allocate.
struct LineBuffer {
  std::array<std::uint8_t, kMaxLineSize> bytes{};
  std::uint32_t size = 0;

  void assign(std::span<const std::uint8_t> src);
  std::span<const std::uint8_t> view() const noexcept { return {bytes.data(), size}; }
  std::span<std::uint8_t> view() noexcept { return {bytes.data(), size}; }
};

/// Per-line state at one level. `line` is the full line-aligned address; the
/// model-specific tag is derived from it.
struct CacheLine {
  bool valid = false;
  bool dirty = false;
  bool spec_bit = false;
  DomainId domain = DomainId::none();
  Address line;
  RequestId installed_by = 0;
};

struct EvictedLine {
  Address line;
  DomainId domain;
  bool dirty = false;
  bool spec_bit = false;
  RequestId installed_by = 0;
  LineBuffer data;  // meaningful only when dirty
};

enum class AccessKind : std::uint8_t { Hit, MissFilled, MissForwardNoFill };

std::string_view to_string(AccessKind k) noexcept;

struct AccessOutcome {
  AccessKind kind = AccessKind::Hit;
  /// 1 = L1, 2 = L2, 3 = memory.
  unsigned source_level = 1;
  std::uint32_t latency_cycles = 0;
  std::optional<EvictedLine> evicted;
  /// Slot picked by random replacement (absent for hits, in-place
  /// replacements and fills into free slots).
  std::optional<std::uint32_t> random_victim_slot;
  /// A non-speculative hit turned the line's SpecBit from 1 to 0.
  bool spec_cleared = false;
  LineBuffer data;

  std::optional<Address> victim_evicted() const {
    return evicted ? std::optional<Address>(evicted->line) : std::nullopt;
  }
};

/// One-way squash invalidation. Never issued with source_level 1.
struct SFillInvRequest {
  Address addr;
  DomainId domain;
  unsigned source_level = 2;
  RequestId origin = 0;
};

enum class SFillInvAction : std::uint8_t { Propagate, Drop };
enum class SFillInvCase : std::uint8_t { FoundNonSpeculative, FoundSpeculative, NotFound };

struct SFillInvResult {
  SFillInvAction action = SFillInvAction::Drop;
  SFillInvCase found = SFillInvCase::NotFound;
};

/// The three-way decision made by a cache at `level` receiving an SFill-Inv.
/// Invalidation itself (case FoundSpeculative) is carried out by the caller.
SFillInvResult decide_sfill_inv(SFillInvCase found, unsigned source_level, unsigned level) noexcept;

/// Where a missing L1 line comes from. `data` stays valid until the next
/// call into the hierarchy.
struct Fill {
  std::span<const std::uint8_t> data;
  unsigned source_level = 3;
  std::uint32_t latency_cycles = 0;
};

class NextLevel {
 public:
  virtual ~NextLevel() = default;
  virtual Fill fetch(const MemoryRequest& req) = 0;
};

enum class ModelKind : std::uint8_t { SaLru, StarFarr, StarNews };

std::string_view to_string(ModelKind k) noexcept;
/// Accepts "sa-lru", "star-farr", "star-news"; throws ConfigError otherwise.
ModelKind parse_model(std::string_view name);

/// Test-only mutations used to prove the self-test catches broken models.
enum class FaultInjection : std::uint8_t { None, FarrDeterministicVictim, NewsFillOnSpecTagMiss };

FaultInjection parse_fault(std::string_view name);
std::string_view to_string(FaultInjection f) noexcept;

}  // namespace starsim
