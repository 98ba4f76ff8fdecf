#include "incidence/binning.hpp"

#include <algorithm>
#include <stdexcept>

namespace incidence {

BinMapper BinMapper::fit(std::span<const double> features_row_major, std::size_t n_rows,
                         std::size_t n_cols, int max_bins) {
  if (n_rows == 0) throw std::invalid_argument("fit_bins: empty feature matrix");
  if (max_bins < 1 || max_bins > kMaxBins) throw std::invalid_argument("fit_bins: bad max_bins");

  std::vector<std::vector<double>> edges(n_cols);
  std::vector<double> column(n_rows);
  for (std::size_t c = 0; c < n_cols; ++c) {
    for (std::size_t i = 0; i < n_rows; ++i) column[i] = features_row_major[i * n_cols + c];
    std::sort(column.begin(), column.end());

    std::vector<double> distinct;
    distinct.reserve(std::min<std::size_t>(n_rows, 4096));
    for (double v : column) {
      if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
    }

    std::vector<double>& e = edges[c];
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      // one bin per distinct value; edges at midpoints
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        e.push_back(0.5 * (distinct[i] + distinct[i + 1]));
      }
    } else {
      // quantile cuts; duplicates collapse so edges stay strictly increasing
      for (int b = 1; b < max_bins; ++b) {
        const std::size_t pos = static_cast<std::size_t>(b) * n_rows / max_bins;
        const double lo = column[pos - 1];
        const double hi = column[pos];
        if (hi > lo) {
          const double edge = 0.5 * (lo + hi);
          if (e.empty() || edge > e.back()) e.push_back(edge);
        }
      }
    }
  }
  return BinMapper(std::move(edges));
}

void BinMapper::append_uniform_column(double lo, double hi, int max_bins) {
  if (!(hi > lo)) throw std::invalid_argument("append_uniform_column: hi must exceed lo");
  std::vector<double> e;
  e.reserve(max_bins - 1);
  for (int b = 1; b < max_bins; ++b) {
    e.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(max_bins));
  }
  edges_.push_back(std::move(e));
}

int BinMapper::bin(int column, double value) const {
  const std::vector<double>& e = edges_[column];
  return static_cast<int>(std::upper_bound(e.begin(), e.end(), value) - e.begin());
}

BinMapper fit_bins(std::span<const double> features_row_major, std::size_t n_rows,
                   std::size_t n_cols, int max_bins) {
  return BinMapper::fit(features_row_major, n_rows, n_cols, max_bins);
}

BinnedMatrix BinnedMatrix::from(const BinMapper& mapper, std::span<const double> features_row_major,
                                std::size_t n_rows, std::size_t n_cols) {
  if (static_cast<int>(n_cols) > mapper.n_columns()) {
    throw std::invalid_argument("BinnedMatrix: mapper covers fewer columns than requested");
  }
  BinnedMatrix m;
  m.n_rows = n_rows;
  m.n_cols = static_cast<int>(n_cols);
  m.bins.resize(n_rows * n_cols);
  m.col_bins.resize(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) m.col_bins[c] = mapper.n_bins(static_cast<int>(c));
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      m.bins[i * n_cols + c] = static_cast<std::uint8_t>(
          mapper.bin(static_cast<int>(c), features_row_major[i * n_cols + c]));
    }
  }
  return m;
}

}  // namespace incidence
