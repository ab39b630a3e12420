#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "starsim/stats.hpp"

namespace starsim {

/// Key/value lines written as `# key = value` above every CSV.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// Attacker timing grid: rows are secret or input values, columns are
/// blocks (flush-reload) or sets / prime positions (prime-probe). Each cell
/// accumulates latency samples. Alongside the cell means it keeps one
/// (row, extreme column) pair per trial for leakage scoring.
class ObservationMatrix {
 public:
  ObservationMatrix() = default;
  ObservationMatrix(std::vector<std::uint32_t> row_labels, std::size_t cols);
  /// Rows labelled 0..rows-1.
  static ObservationMatrix dense(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  std::uint32_t row_label(std::size_t r) const { return labels_.at(r); }
  std::optional<std::size_t> row_of(std::uint32_t label) const;

  void add(std::size_t row, std::size_t col, double latency);
  void record_extreme(std::size_t row, std::size_t col);

  const RunningStats& cell(std::size_t row, std::size_t col) const { return cells_.at(row * cols_ + col); }
  double mean(std::size_t row, std::size_t col) const { return cell(row, col).mean(); }
  std::uint64_t trials(std::size_t row, std::size_t col) const { return cell(row, col).count(); }
  std::uint64_t min_cell_trials() const noexcept;
  std::uint64_t total_trials() const noexcept { return extremes_.size(); }

  /// (row label, column) per trial.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& extremes() const noexcept { return extremes_; }

  /// `row,col,mean_latency,trials`, one line per cell, after the echo lines.
  void write_csv(std::ostream& os, const ConfigEcho& echo) const;

 private:
  std::vector<std::uint32_t> labels_;
  std::size_t cols_ = 0;
  std::vector<RunningStats> cells_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> extremes_;
};

void write_echo(std::ostream& os, const ConfigEcho& echo);

/// Fixed-precision rendering used in every output file.
std::string format_number(double v);

}  // namespace starsim
