#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "starsim/aes.hpp"
#include "starsim/hierarchy.hpp"
#include "starsim/observation.hpp"

namespace starsim {

inline constexpr DomainId kAttackerDomain{1};
inline constexpr DomainId kVictimDomain{2};

/// Largest confidence written to reports; a noiseless separation is infinite.
inline constexpr double kConfidenceCap = 1e6;

struct AttackConfig {
  HierarchyConfig hierarchy;
  /// AES: total encryptions. Spectre: trials per secret value.
  std::uint64_t trials = std::uint64_t{1} << 15;
  std::uint64_t seed = 1;
  /// Standard deviation of Gaussian noise added to every timed access.
  double noise_sigma = 0.0;
  /// Minimum best-vs-runner-up z score for a recovery.
  double threshold = 5.0;
};

/// Fixed addresses used by the drivers.
struct AttackLayout {
  AesLayout aes;
  /// Blocks monitored per T-table region by flush-reload.
  std::uint32_t fr_blocks_per_table = 64;
  std::uint64_t prime_base = 0x400000;
  /// One line holding array1_size, array1[16] and the secret.
  std::uint64_t spectre_line = 0x200000;
  std::uint64_t array1_offset = 16;
  std::uint64_t secret_offset = 48;
  std::uint64_t shared_base = 0x300000;
  std::uint32_t shared_blocks = 256;
  std::uint32_t shared_stride = 64;
};

struct NibbleRecovery {
  std::optional<std::uint8_t> nibble;
  double confidence = 0.0;
  unsigned best = 0;
};

struct AesAttackResult {
  /// Key byte 0: rows are input byte values, columns blocks (FR) or sets /
  /// prime positions (PP).
  ObservationMatrix matrix;
  std::array<NibbleRecovery, 16> recovery{};

  std::size_t recovered_count() const noexcept;
};

AesAttackResult run_flush_reload_aes(const AesBlock& key, const AttackConfig& config, const AttackLayout& layout = {});
AesAttackResult run_prime_probe_aes(const AesBlock& key, const AttackConfig& config, const AttackLayout& layout = {});

struct SpectreOptions {
  /// Sender and receiver share a DomainID.
  bool same_domain = true;
  /// When false the branch resolves correctly and no wrong-path load runs.
  bool enter_wrong_path = true;
};

struct SecretRecovery {
  std::uint8_t secret = 0;
  std::optional<std::uint8_t> recovered;
  double confidence = 0.0;
  unsigned best = 0;
};

struct SpectreAttackResult {
  /// Rows are secrets, columns probe blocks (FR) or sets / prime positions (PP).
  ObservationMatrix matrix;
  std::vector<SecretRecovery> per_secret;

  std::size_t correct() const noexcept;
  std::size_t none() const noexcept;
};

SpectreAttackResult run_spectre_fr(std::span<const std::uint8_t> secrets, const AttackConfig& config,
                                   SpectreOptions options = {}, const AttackLayout& layout = {});
SpectreAttackResult run_spectre_pp(std::span<const std::uint8_t> secrets, const AttackConfig& config,
                                   SpectreOptions options = {}, const AttackLayout& layout = {});

/// Columns a prime-probe matrix uses: sets for the baseline, prime-array
/// positions for the STAR models.
std::size_t prime_probe_columns(const HierarchyConfig& hierarchy);

}  // namespace starsim
