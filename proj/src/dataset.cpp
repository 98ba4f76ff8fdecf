#include "incidence/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace incidence {

SurvivalDataset::SurvivalDataset(std::vector<double> features, std::size_t n_features,
                                 std::vector<double> durations, std::vector<int> events,
                                 int n_event_types, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      n_features_(n_features),
      durations_(std::move(durations)),
      events_(std::move(events)),
      feature_names_(std::move(feature_names)) {
  const std::size_t n = durations_.size();
  if (events_.size() != n) throw std::invalid_argument("durations and events differ in length");
  if (n == 0) throw std::invalid_argument("dataset must have at least one row");
  if (n_features_ == 0) throw std::invalid_argument("dataset must have at least one feature");
  if (features_.size() != n * n_features_) {
    throw std::invalid_argument("feature matrix size does not match n_rows * n_features");
  }

  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(durations_[i] > 0.0) || !std::isfinite(durations_[i])) {
      throw std::invalid_argument("row " + std::to_string(i + 1) +
                                  ": duration must be strictly positive");
    }
    if (events_[i] < 0) {
      throw std::invalid_argument("row " + std::to_string(i + 1) +
                                  ": event label must be non-negative");
    }
    max_label = std::max(max_label, events_[i]);
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw std::invalid_argument("features must be finite");
  }

  n_event_types_ = n_event_types > 0 ? n_event_types : std::max(max_label, 1);
  if (max_label > n_event_types_) {
    throw std::invalid_argument("event label " + std::to_string(max_label) +
                                " exceeds n_event_types " + std::to_string(n_event_types_));
  }

  if (feature_names_.empty()) {
    feature_names_.reserve(n_features_);
    for (std::size_t j = 0; j < n_features_; ++j) feature_names_.push_back("x" + std::to_string(j));
  } else if (feature_names_.size() != n_features_) {
    throw std::invalid_argument("feature_names size does not match n_features");
  }

  max_duration_ = *std::max_element(durations_.begin(), durations_.end());
}

SurvivalDataset SurvivalDataset::take_rows(std::span<const std::size_t> indices) const {
  std::vector<double> f;
  f.reserve(indices.size() * n_features_);
  std::vector<double> d;
  d.reserve(indices.size());
  std::vector<int> e;
  e.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= n_rows()) throw std::out_of_range("take_rows index out of range");
    const auto r = row(i);
    f.insert(f.end(), r.begin(), r.end());
    d.push_back(durations_[i]);
    e.push_back(events_[i]);
  }
  return SurvivalDataset(std::move(f), n_features_, std::move(d), std::move(e), n_event_types_,
                         feature_names_);
}

namespace {

// Nearest-rank (type-1) quantile of an ascending sample.
double nearest_rank(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(m)));
  if (rank == 0) rank = 1;
  if (rank > m) rank = m;
  return sorted[rank - 1];
}

}  // namespace

TimeGrid quantile_grid(const SurvivalDataset& dataset, std::span<const double> quantiles) {
  std::vector<double> event_times;
  event_times.reserve(dataset.n_rows());
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    if (dataset.event(i) != 0) event_times.push_back(dataset.duration(i));
  }
  if (event_times.empty()) throw std::runtime_error("quantile_grid: no observed events");
  std::sort(event_times.begin(), event_times.end());

  double prev_q = 0.0;
  TimeGrid grid;
  grid.t_max = dataset.max_duration();
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantiles must lie in (0, 1)");
    if (q <= prev_q && !grid.horizons.empty()) {
      throw std::invalid_argument("quantiles must be strictly increasing");
    }
    prev_q = q;
    const double h = nearest_rank(event_times, q);
    if (grid.horizons.empty() || h > grid.horizons.back()) grid.horizons.push_back(h);
  }
  if (grid.horizons.empty()) throw std::invalid_argument("quantile_grid: empty quantile list");
  return grid;
}

TimeGrid uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 1) throw std::invalid_argument("uniform_grid needs at least one point");
  if (!(hi >= lo)) throw std::invalid_argument("uniform_grid: hi must be >= lo");
  if (points > 1 && !(hi > lo)) {
    throw std::invalid_argument("uniform_grid: a multi-point grid needs hi > lo");
  }
  TimeGrid grid;
  grid.t_max = hi;
  grid.horizons.reserve(points);
  if (points == 1) {
    grid.horizons.push_back(lo);
    return grid;
  }
  for (std::size_t j = 0; j < points; ++j) {
    grid.horizons.push_back(lo + (hi - lo) * static_cast<double>(j) /
                                     static_cast<double>(points - 1));
  }
  return grid;
}

}  // namespace incidence
