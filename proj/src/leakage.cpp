#include "starsim/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "starsim/rng.hpp"

namespace starsim {

double plugin_mutual_information(std::span<const std::pair<std::uint32_t, std::uint32_t>> samples) {
  if (samples.empty()) return 0.0;
  std::unordered_map<std::uint32_t, std::uint64_t> nx;
  std::unordered_map<std::uint32_t, std::uint64_t> ny;
  std::unordered_map<std::uint64_t, std::uint64_t> nxy;
  for (const auto& [x, y] : samples) {
    ++nx[x];
    ++ny[y];
    ++nxy[(std::uint64_t{x} << 32) | y];
  }
  // Summed in key order so the result does not depend on hash iteration.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> joint(nxy.begin(), nxy.end());
  std::sort(joint.begin(), joint.end());
  const double n = static_cast<double>(samples.size());
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double c = static_cast<double>(count);
    const double px = static_cast<double>(nx[static_cast<std::uint32_t>(key >> 32)]);
    const double py = static_cast<double>(ny[static_cast<std::uint32_t>(key)]);
    mi += c / n * std::log2(c * n / (px * py));
  }
  return std::max(mi, 0.0);
}

LeakageScore leakage_score(const ObservationMatrix& m, unsigned permutations, std::uint64_t seed) {
  const auto& samples = m.extremes();
  if (samples.size() < kMinLeakageSamples) {
    throw InsufficientTrials("leakage score needs at least " + std::to_string(kMinLeakageSamples) +
                             " trials, got " + std::to_string(samples.size()));
  }
  LeakageScore score;
  score.samples = samples.size();
  score.bits = plugin_mutual_information(samples);

  std::vector<std::uint32_t> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(s.first);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shuffled(samples.begin(), samples.end());
  Rng rng(seed);
  RunningStats null;
  for (unsigned p = 0; p < permutations; ++p) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < rows.size(); ++i) shuffled[i].first = rows[i];
    null.add(plugin_mutual_information(shuffled));
  }
  score.noise_floor = null.mean() + 4.0 * null.stddev();
  return score;
}

}  // namespace starsim
