#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace incidence {

// Per-column bin edges for histogram splits. A value lands in the first bin
// whose edge exceeds it; values past the last edge land in the last bin.
class BinMapper {
 public:
  static constexpr int kMaxBins = 255;

  BinMapper() = default;
  explicit BinMapper(std::vector<std::vector<double>> edges) : edges_(std::move(edges)) {}

  // Quantile-based edges, at most max_bins bins per column; constant columns
  // map to a single bin.
  static BinMapper fit(std::span<const double> features_row_major, std::size_t n_rows,
                       std::size_t n_cols, int max_bins = kMaxBins);

  // Adds a column with equal-width edges on [lo, hi]; used for the stacked
  // time horizon, whose training distribution is uniform.
  void append_uniform_column(double lo, double hi, int max_bins = kMaxBins);

  int bin(int column, double value) const;
  int n_columns() const { return static_cast<int>(edges_.size()); }
  int n_bins(int column) const { return static_cast<int>(edges_[column].size()) + 1; }
  const std::vector<std::vector<double>>& edges() const { return edges_; }

 private:
  std::vector<std::vector<double>> edges_;
};

BinMapper fit_bins(std::span<const double> features_row_major, std::size_t n_rows,
                   std::size_t n_cols, int max_bins = BinMapper::kMaxBins);

// Row-major binned feature block.
struct BinnedMatrix {
  std::size_t n_rows = 0;
  int n_cols = 0;
  std::vector<std::uint8_t> bins;
  std::vector<int> col_bins;  // bin count per column, for split search

  static BinnedMatrix from(const BinMapper& mapper, std::span<const double> features_row_major,
                           std::size_t n_rows, std::size_t n_cols);

  const std::uint8_t* row(std::size_t i) const { return bins.data() + i * n_cols; }
  std::uint8_t* row_mut(std::size_t i) { return bins.data() + i * n_cols; }
};

}  // namespace incidence
