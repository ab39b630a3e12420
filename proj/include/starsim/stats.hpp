#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace starsim {

/// Streaming mean/variance (Welford).
class RunningStats {
 public:
  void add(double x) noexcept;
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 with fewer than two samples.
  double variance() const noexcept;
  double stddev() const noexcept;
  double std_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ChiSquareResult {
  double statistic = 0.0;
  unsigned degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of `counts` against equal expected frequencies.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

/// Sums adjacent bins so `counts.size()` bins become `bins` bins.
std::vector<std::uint64_t> regroup(std::span<const std::uint64_t> counts, std::size_t bins);

/// Welch-style separation of the two best candidates.
struct Contrast {
  std::size_t best = 0;
  std::size_t runner_up = 0;
  double best_mean = 0.0;
  double runner_up_mean = 0.0;
  /// gap / sqrt(se_best^2 + se_runner^2); +inf for a noiseless gap, 0 for no gap.
  double z = 0.0;
};

struct Candidate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Picks the smallest mean (`want_low`) or the largest and measures how far
/// it stands from the next candidate. Needs at least two candidates.
Contrast contrast(std::span<const Candidate> candidates, bool want_low);

Candidate candidate_of(const RunningStats& s) noexcept;

}  // namespace starsim
