#include "incidence/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "incidence/marginal.hpp"

namespace incidence {

namespace {

constexpr double kLogFloor = 1e-15;

double floored_log(double p) { return std::log(std::max(p, kLogFloor)); }

}  // namespace

double brier_k(std::span<const double> cif_k, const SurvivalDataset& dataset, double zeta,
               int event_type, const CensoringModel& g_hat, double clip_floor) {
  const std::size_t n = dataset.n_rows();
  if (cif_k.size() != n) throw std::invalid_argument("brier_k: one prediction per row required");
  if (event_type < 1 || event_type > dataset.n_event_types()) {
    throw std::invalid_argument("brier_k: event_type out of range");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dataset.duration(i);
    const int label = dataset.event(i);
    const double f = cif_k[i];
    if (t > zeta) {
      total += f * f / std::max(g_hat.remaining_before(dataset.row(i), zeta), clip_floor);
    } else if (label == event_type) {
      total += (1.0 - f) * (1.0 - f) /
               std::max(g_hat.remaining_before(dataset.row(i), t), clip_floor);
    } else if (label != 0) {
      total += f * f / std::max(g_hat.remaining_before(dataset.row(i), t), clip_floor);
    }
    // censored at or before zeta: no contribution
  }
  return total / static_cast<double>(n);
}

IbsReport integrated_brier(const CifGrid& predictions, const SurvivalDataset& dataset,
                           const TimeGrid& grid, const CensoringModel& g_hat, double clip_floor) {
  const std::size_t m = grid.horizons.size();
  if (m < 2) throw std::invalid_argument("integrated_brier: grid needs at least two horizons");
  if (predictions.n_rows != dataset.n_rows() || predictions.n_horizons != m ||
      predictions.n_events != dataset.n_event_types()) {
    throw std::invalid_argument("integrated_brier: prediction grid does not match inputs");
  }

  const int k_types = dataset.n_event_types();
  const double span_t = grid.horizons.back() - grid.horizons.front();
  if (!(span_t > 0.0)) throw std::invalid_argument("integrated_brier: degenerate grid span");

  IbsReport report;
  report.per_event.resize(k_types, 0.0);
  std::vector<double> column(dataset.n_rows());
  for (int k = 0; k < k_types; ++k) {
    std::vector<double> bs(m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < dataset.n_rows(); ++i) column[i] = predictions.at(i, j, k);
      bs[j] = brier_k(column, dataset, grid.horizons[j], k + 1, g_hat, clip_floor);
    }
    double integral = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      integral += 0.5 * (bs[j] + bs[j + 1]) * (grid.horizons[j + 1] - grid.horizons[j]);
    }
    report.per_event[k] = integral / span_t;
    report.average += report.per_event[k];
  }
  report.average /= static_cast<double>(k_types);
  return report;
}

TimeGrid default_ibs_grid(const SurvivalDataset& dataset, std::size_t points) {
  const double quantile[] = {0.001};
  const TimeGrid lo_grid = quantile_grid(dataset, quantile);
  return uniform_grid(lo_grid.horizons.front(), dataset.max_duration(), points);
}

std::vector<double> weighted_logloss_terms(std::span<const double> probs,
                                           const SurvivalDataset& dataset, double zeta,
                                           const CensoringModel& g_hat, double clip_floor) {
  const std::size_t n = dataset.n_rows();
  const int n_classes = dataset.n_event_types() + 1;
  if (probs.size() != n * static_cast<std::size_t>(n_classes)) {
    throw std::invalid_argument("weighted_logloss: probs must be n x (K+1)");
  }
  std::vector<double> terms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dataset.duration(i);
    const int label = dataset.event(i);
    const double* p = &probs[i * n_classes];
    if (t > zeta) {
      terms[i] = -floored_log(p[0]) /
                 std::max(g_hat.remaining_before(dataset.row(i), zeta), clip_floor);
    } else if (label != 0) {
      terms[i] = -floored_log(p[label]) /
                 std::max(g_hat.remaining_before(dataset.row(i), t), clip_floor);
    }
  }
  return terms;
}

double weighted_logloss(std::span<const double> probs, const SurvivalDataset& dataset, double zeta,
                        const CensoringModel& g_hat, double clip_floor) {
  const std::vector<double> terms = weighted_logloss_terms(probs, dataset, zeta, g_hat, clip_floor);
  double total = 0.0;
  for (double v : terms) total += v;
  return total / static_cast<double>(terms.size());
}

double accuracy_in_time(std::span<const double> probs, const SurvivalDataset& dataset,
                        double zeta) {
  const std::size_t n = dataset.n_rows();
  const int n_classes = dataset.n_event_types() + 1;
  if (probs.size() != n * static_cast<std::size_t>(n_classes)) {
    throw std::invalid_argument("accuracy_in_time: probs must be n x (K+1)");
  }
  std::size_t evaluable = 0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dataset.duration(i);
    const int label = dataset.event(i);
    if (label == 0 && t <= zeta) continue;  // censored at or before the horizon
    ++evaluable;
    const double* p = &probs[i * n_classes];
    int argmax = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (p[c] > p[argmax]) argmax = c;
    }
    const int observed = t <= zeta ? label : 0;
    if (argmax == observed) ++matches;
  }
  if (evaluable == 0) throw std::runtime_error("accuracy_in_time: no evaluable rows");
  return static_cast<double>(matches) / static_cast<double>(evaluable);
}

double c_index_at(std::span<const double> risk, const SurvivalDataset& dataset, double zeta,
                  int event_type) {
  const std::size_t n = dataset.n_rows();
  if (risk.size() != n) throw std::invalid_argument("c_index_at: one risk score per row required");
  double concordant = 0.0;
  std::size_t comparable = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset.event(i) != event_type || dataset.duration(i) > zeta) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (dataset.duration(j) <= dataset.duration(i)) continue;
      ++comparable;
      if (risk[i] > risk[j]) {
        concordant += 1.0;
      } else if (risk[i] == risk[j]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0) throw std::runtime_error("c_index_at: no comparable pairs");
  return concordant / static_cast<double>(comparable);
}

double s_cen_log_simple(std::span<const double> survival_at_nodes, const SurvivalDataset& dataset,
                        int node_count, double t_max) {
  const std::size_t n = dataset.n_rows();
  if (node_count < 2) throw std::invalid_argument("s_cen_log_simple: need at least two intervals");
  if (!(t_max > 0.0)) throw std::invalid_argument("s_cen_log_simple: t_max must be positive");
  const std::size_t n_nodes = static_cast<std::size_t>(node_count) + 1;
  if (survival_at_nodes.size() != n * n_nodes) {
    throw std::invalid_argument("s_cen_log_simple: survival grid must be n x (B+1)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dataset.duration(i);
    // interval (z_j, z_{j+1}] holding t; out-of-range clamps to the last one
    int j = static_cast<int>(std::ceil(t / t_max * node_count)) - 1;
    j = std::clamp(j, 0, node_count - 1);
    const double* s = &survival_at_nodes[i * n_nodes];
    const double f_hi = 1.0 - s[j + 1];
    if (dataset.event(i) != 0) {
      const double f_lo = 1.0 - s[j];
      total += -floored_log(f_hi - f_lo);
    } else {
      total += -floored_log(1.0 - f_hi);
    }
  }
  return total / static_cast<double>(n);
}

namespace {

void enumerate_simplex(int n_components, int units_left, std::vector<int>& units,
                       const std::function<void(const std::vector<int>&)>& visit) {
  if (n_components == 1) {
    units.push_back(units_left);
    visit(units);
    units.pop_back();
    return;
  }
  for (int u = 0; u <= units_left; ++u) {
    units.push_back(u);
    enumerate_simplex(n_components - 1, units_left - u, units, visit);
    units.pop_back();
  }
}

}  // namespace

std::vector<double> properness_probe(std::span<const double> oracle_probs,
                                     const StepCurve& censoring, double grid_step, double horizon,
                                     std::span<const double> event_times,
                                     const StepCurve* weight_curve, double clip_floor) {
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    throw std::invalid_argument("properness_probe: grid_step must lie in (0, 0.1]");
  }
  const int n_classes = static_cast<int>(oracle_probs.size());
  if (n_classes < 2) throw std::invalid_argument("properness_probe: need at least two classes");
  if (event_times.size() + 1 != oracle_probs.size()) {
    throw std::invalid_argument("properness_probe: one event time per event class required");
  }
  double mass = 0.0;
  for (double p : oracle_probs) {
    if (p < 0.0) throw std::invalid_argument("properness_probe: oracle probabilities must be >= 0");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("properness_probe: oracle probabilities must sum to 1");
  }
  for (double t : event_times) {
    if (!(t > 0.0 && t <= horizon)) {
      throw std::invalid_argument("properness_probe: event times must lie in (0, horizon]");
    }
  }

  const StepCurve& weights = weight_curve != nullptr ? *weight_curve : censoring;

  // Analytic expected-loss coefficients: each class's observation probability
  // under the true law times the weight the scored loss would apply to it.
  std::vector<double> coeff(n_classes);
  coeff[0] = oracle_probs[0] * censoring.at(horizon) * ipcw_weight(weights, horizon, clip_floor);
  for (int k = 1; k < n_classes; ++k) {
    const double tau = event_times[k - 1];
    coeff[k] = oracle_probs[k] * censoring.before(tau) * ipcw_weight(weights, tau, clip_floor);
  }

  const int steps = static_cast<int>(std::lround(1.0 / grid_step));
  if (std::abs(steps * grid_step - 1.0) > 1e-9) {
    throw std::invalid_argument("properness_probe: grid_step must divide 1 evenly");
  }

  std::vector<double> best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<int> units;
  enumerate_simplex(n_classes, steps, units, [&](const std::vector<int>& u) {
    double loss = 0.0;
    for (int c = 0; c < n_classes; ++c) {
      loss -= coeff[c] * floored_log(static_cast<double>(u[c]) * grid_step);
    }
    if (loss < best_loss) {
      best_loss = loss;
      best.resize(n_classes);
      for (int c = 0; c < n_classes; ++c) best[c] = static_cast<double>(u[c]) * grid_step;
    }
  });
  return best;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["per_event_ibs"] = report.per_event_ibs;
  j["average_ibs"] = report.average_ibs;
  j["horizons"] = report.horizons;
  j["accuracy"] = report.accuracy;
  j["c_index"] = report.c_index;
  if (report.s_cen_log_simple.has_value()) {
    j["s_cen_log_simple"] = *report.s_cen_log_simple;
    j["s_cen_nodes"] = report.s_cen_nodes;
  }
  j["weighted_logloss"] = report.logloss;
  j["logloss_horizon"] = report.logloss_horizon;
  if (report.oracle_ibs.has_value()) {
    j["oracle_ibs"] = *report.oracle_ibs;
    j["oracle_ibs_delta"] = report.average_ibs - *report.oracle_ibs;
  }
  if (report.cif_monotonicity.has_value()) j["cif_monotonicity"] = *report.cif_monotonicity;
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const MetricReport& report) {
  std::string out = "metric,event,horizon,value\n";
  for (std::size_t k = 0; k < report.per_event_ibs.size(); ++k) {
    out += "ibs," + std::to_string(k + 1) + ",," + fmt(report.per_event_ibs[k]) + "\n";
  }
  out += "ibs_avg,,," + fmt(report.average_ibs) + "\n";
  for (std::size_t h = 0; h < report.horizons.size(); ++h) {
    out += "accuracy,," + fmt(report.horizons[h]) + "," + fmt(report.accuracy[h]) + "\n";
  }
  for (std::size_t k = 0; k < report.c_index.size(); ++k) {
    for (std::size_t h = 0; h < report.c_index[k].size(); ++h) {
      out += "c_index," + std::to_string(k + 1) + "," + fmt(report.horizons[h]) + "," +
             fmt(report.c_index[k][h]) + "\n";
    }
  }
  if (report.s_cen_log_simple.has_value()) {
    out += "s_cen_log_simple,,," + fmt(*report.s_cen_log_simple) + "\n";
  }
  out += "weighted_logloss,," + fmt(report.logloss_horizon) + "," + fmt(report.logloss) + "\n";
  if (report.oracle_ibs.has_value()) {
    out += "oracle_ibs,,," + fmt(*report.oracle_ibs) + "\n";
  }
  if (report.cif_monotonicity.has_value()) {
    out += "cif_monotonicity,,," + fmt(*report.cif_monotonicity) + "\n";
  }
  return out;
}

}  // namespace incidence
