#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace incidence {

// Right-censored competing-risks observations. Event label 0 means censored;
// labels 1..n_event_types are the competing events. Immutable after
// construction and safe to share read-only across workers.
class SurvivalDataset {
 public:
  // features is row-major n*d. n_event_types == 0 infers K from the labels
  // (at least 1, so an all-censored sample is still a valid one-event set).
  SurvivalDataset(std::vector<double> features, std::size_t n_features,
                  std::vector<double> durations, std::vector<int> events,
                  int n_event_types = 0,
                  std::vector<std::string> feature_names = {});

  std::size_t n_rows() const { return durations_.size(); }
  std::size_t n_features() const { return n_features_; }
  int n_event_types() const { return n_event_types_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * n_features_, n_features_};
  }
  double duration(std::size_t i) const { return durations_[i]; }
  int event(std::size_t i) const { return events_[i]; }

  std::span<const double> features() const { return features_; }
  std::span<const double> durations() const { return durations_; }
  std::span<const int> events() const { return events_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  double max_duration() const { return max_duration_; }

  SurvivalDataset take_rows(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> features_;
  std::size_t n_features_;
  std::vector<double> durations_;
  std::vector<int> events_;
  int n_event_types_;
  std::vector<std::string> feature_names_;
  double max_duration_;
};

// Strictly increasing evaluation horizons, all within [0, t_max].
struct TimeGrid {
  std::vector<double> horizons;
  double t_max = 0.0;
};

// Horizons at the nearest-rank (type-1) empirical quantiles of the observed
// event times (rows with event != 0); t_max is the largest duration overall.
// Throws if every row is censored. Collapsing quantiles are deduplicated so
// the result stays strictly increasing.
TimeGrid quantile_grid(const SurvivalDataset& dataset, std::span<const double> quantiles);

TimeGrid uniform_grid(double lo, double hi, std::size_t points);

}  // namespace incidence
