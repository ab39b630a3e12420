#include "starsim/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace starsim {

void RunningStats::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const noexcept { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::stddev() const noexcept { return std::sqrt(variance()); }

double RunningStats::std_error() const noexcept {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi-square needs at least two bins");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("chi-square needs at least one observation");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.degrees_of_freedom = static_cast<unsigned>(counts.size() - 1);
  const boost::math::chi_squared dist(r.degrees_of_freedom);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

std::vector<std::uint64_t> regroup(std::span<const std::uint64_t> counts, std::size_t bins) {
  if (bins == 0 || counts.size() % bins != 0) throw std::invalid_argument("bins must divide the count vector");
  const std::size_t width = counts.size() / bins;
  std::vector<std::uint64_t> out(bins, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) out[i / width] += counts[i];
  return out;
}

Candidate candidate_of(const RunningStats& s) noexcept { return {s.mean(), s.std_error()}; }

Contrast contrast(std::span<const Candidate> candidates, bool want_low) {
  if (candidates.size() < 2) throw std::invalid_argument("contrast needs at least two candidates");
  auto better = [want_low](double a, double b) { return want_low ? a < b : a > b; };
  Contrast c;
  c.best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (better(candidates[i].mean, candidates[c.best].mean)) c.best = i;
  }
  c.runner_up = c.best == 0 ? 1 : 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i != c.best && better(candidates[i].mean, candidates[c.runner_up].mean)) c.runner_up = i;
  }
  const Candidate& b = candidates[c.best];
  const Candidate& r = candidates[c.runner_up];
  c.best_mean = b.mean;
  c.runner_up_mean = r.mean;
  const double gap = std::abs(b.mean - r.mean);
  const double se = std::sqrt(b.std_error * b.std_error + r.std_error * r.std_error);
  if (se == 0.0) {
    c.z = gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    c.z = gap / se;
  }
  return c;
}

}  // namespace starsim
