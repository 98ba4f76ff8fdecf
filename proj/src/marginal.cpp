#include "incidence/marginal.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace incidence {

namespace {

struct TimeGroup {
  double time;
  std::size_t n_events;    // any-type events at this time
  std::size_t n_censored;  // censorings at this time
  std::size_t at_risk;     // rows with duration >= time
};

// Groups rows by unique duration, ascending; events share a timestamp with
// censorings but are processed first, so both count toward at_risk here.
std::vector<TimeGroup> group_times(std::span<const double> durations,
                                   std::span<const bool> observed) {
  const std::size_t n = durations.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });

  std::vector<TimeGroup> groups;
  std::size_t i = 0;
  std::size_t remaining = n;
  while (i < n) {
    const double t = durations[order[i]];
    TimeGroup g{t, 0, 0, remaining};
    while (i < n && durations[order[i]] == t) {
      if (observed[order[i]]) {
        ++g.n_events;
      } else {
        ++g.n_censored;
      }
      ++i;
    }
    remaining -= g.n_events + g.n_censored;
    groups.push_back(g);
  }
  return groups;
}

}  // namespace

StepCurve kaplan_meier(std::span<const double> durations, std::span<const bool> observed) {
  if (durations.empty()) throw std::invalid_argument("kaplan_meier: empty input");
  if (durations.size() != observed.size()) {
    throw std::invalid_argument("kaplan_meier: durations and observed differ in length");
  }
  StepCurve curve;
  curve.value_at_zero = 1.0;
  double survival = 1.0;
  for (const TimeGroup& g : group_times(durations, observed)) {
    if (g.n_events == 0) continue;  // the curve only steps at event times
    survival *= 1.0 - static_cast<double>(g.n_events) / static_cast<double>(g.at_risk);
    curve.times.push_back(g.time);
    curve.values.push_back(survival);
  }
  return curve;
}

StepCurve kaplan_meier(std::span<const double> durations, const std::vector<bool>& observed) {
  std::unique_ptr<bool[]> flat(new bool[observed.size()]);
  for (std::size_t i = 0; i < observed.size(); ++i) flat[i] = observed[i];
  return kaplan_meier(durations, std::span<const bool>(flat.get(), observed.size()));
}

StepCurve censoring_km(const SurvivalDataset& dataset) {
  const std::size_t n = dataset.n_rows();
  std::unique_ptr<bool[]> censored(new bool[n]);
  for (std::size_t i = 0; i < n; ++i) censored[i] = dataset.event(i) == 0;
  return kaplan_meier(dataset.durations(), std::span<const bool>(censored.get(), n));
}

CompetingCurves aalen_johansen(const SurvivalDataset& dataset) {
  const int k_types = dataset.n_event_types();
  const std::size_t n = dataset.n_rows();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset.duration(a) < dataset.duration(b);
  });

  CompetingCurves out;
  out.cif.resize(k_types);
  std::vector<double> cif_acc(k_types, 0.0);
  double survival_pre = 1.0;  // S(u-): all-events Kaplan-Meier just before u

  std::size_t i = 0;
  std::size_t remaining = n;
  while (i < n) {
    const double t = dataset.duration(order[i]);
    std::vector<std::size_t> d_k(k_types, 0);
    std::size_t d_total = 0;
    std::size_t group = 0;
    while (i < n && dataset.duration(order[i]) == t) {
      const int e = dataset.event(order[i]);
      if (e != 0) {
        ++d_k[e - 1];
        ++d_total;
      }
      ++group;
      ++i;
    }
    if (d_total > 0) {
      const double at_risk = static_cast<double>(remaining);
      for (int k = 0; k < k_types; ++k) {
        cif_acc[k] += survival_pre * static_cast<double>(d_k[k]) / at_risk;
        out.cif[k].times.push_back(t);
        out.cif[k].values.push_back(cif_acc[k]);
      }
      double total_cif = 0.0;
      for (double c : cif_acc) total_cif += c;
      out.survival.times.push_back(t);
      out.survival.values.push_back(1.0 - total_cif);
      survival_pre *= 1.0 - static_cast<double>(d_total) / at_risk;
    }
    remaining -= group;
  }

  for (auto& c : out.cif) c.value_at_zero = 0.0;
  out.survival.value_at_zero = 1.0;
  return out;
}

double ipcw_weight(const StepCurve& g, double t, double clip_floor) {
  return 1.0 / std::max(g.before(t), clip_floor);
}

}  // namespace incidence
