#include "starsim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace starsim {

ObservationMatrix::ObservationMatrix(std::vector<std::uint32_t> row_labels, std::size_t cols)
    : labels_(std::move(row_labels)), cols_(cols), cells_(labels_.size() * cols) {}

ObservationMatrix ObservationMatrix::dense(std::size_t rows, std::size_t cols) {
  std::vector<std::uint32_t> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) labels[r] = static_cast<std::uint32_t>(r);
  return ObservationMatrix(std::move(labels), cols);
}

std::optional<std::size_t> ObservationMatrix::row_of(std::uint32_t label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

void ObservationMatrix::add(std::size_t row, std::size_t col, double latency) {
  if (row >= rows() || col >= cols_) throw std::out_of_range("ObservationMatrix::add outside the grid");
  cells_[row * cols_ + col].add(latency);
}

void ObservationMatrix::record_extreme(std::size_t row, std::size_t col) {
  if (row >= rows() || col >= cols_) throw std::out_of_range("ObservationMatrix::record_extreme outside the grid");
  extremes_.emplace_back(labels_[row], static_cast<std::uint32_t>(col));
}

std::uint64_t ObservationMatrix::min_cell_trials() const noexcept {
  if (cells_.empty()) return 0;
  std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
  for (const auto& c : cells_) m = std::min(m, c.count());
  return m;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_echo(std::ostream& os, const ConfigEcho& echo) {
  for (const auto& [k, v] : echo) os << "# " << k << " = " << v << '\n';
}

void ObservationMatrix::write_csv(std::ostream& os, const ConfigEcho& echo) const {
  write_echo(os, echo);
  os << "row,col,mean_latency,trials\n";
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      const RunningStats& s = cell(r, c);
      os << labels_[r] << ',' << c << ',' << format_number(s.mean()) << ',' << s.count() << '\n';
    }
  }
}

}  // namespace starsim
