#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "incidence/censoring.hpp"
#include "incidence/dataset.hpp"

namespace incidence {

// Predicted CIF values F_k(zeta_j | x_i), indexed (row, horizon, event).
struct CifGrid {
  std::size_t n_rows = 0;
  std::size_t n_horizons = 0;
  int n_events = 0;
  std::vector<double> values;

  static CifGrid zeros(std::size_t n_rows, std::size_t n_horizons, int n_events) {
    return {n_rows, n_horizons, n_events,
            std::vector<double>(n_rows * n_horizons * static_cast<std::size_t>(n_events), 0.0)};
  }
  double& at(std::size_t i, std::size_t j, int k) {
    return values[(i * n_horizons + j) * n_events + k];
  }
  double at(std::size_t i, std::size_t j, int k) const {
    return values[(i * n_horizons + j) * n_events + k];
  }
};

// Censoring-adjusted Brier score for event k at horizon zeta:
//   t_i <= zeta, event == k          -> (1 - F)^2 / G(t_i-)
//   t_i >  zeta                      -> F^2 / G(zeta-)
//   t_i <= zeta, event not in {0,k}  -> F^2 / G(t_i-)
// and rows censored before zeta contribute nothing.
double brier_k(std::span<const double> cif_k, const SurvivalDataset& dataset, double zeta,
               int event_type, const CensoringModel& g_hat, double clip_floor = 1e-12);

struct IbsReport {
  std::vector<double> per_event;
  double average = 0.0;
};

// Trapezoidal integral of brier_k over the grid, normalized by the grid span;
// the average across events is the headline number. Needs >= 2 horizons.
IbsReport integrated_brier(const CifGrid& predictions, const SurvivalDataset& dataset,
                           const TimeGrid& grid, const CensoringModel& g_hat,
                           double clip_floor = 1e-12);

// Default evaluation grid: uniform points from the 0.001 quantile of observed
// event times up to the largest duration.
TimeGrid default_ibs_grid(const SurvivalDataset& dataset, std::size_t points = 100);

// Per-row terms of the IPCW-weighted multiclass log-loss at horizon zeta.
// probs is row-major n x (K+1) with class 0 = survival. Predictions are
// floored at 1e-15 before the log.
std::vector<double> weighted_logloss_terms(std::span<const double> probs,
                                           const SurvivalDataset& dataset, double zeta,
                                           const CensoringModel& g_hat,
                                           double clip_floor = 1e-12);

double weighted_logloss(std::span<const double> probs, const SurvivalDataset& dataset, double zeta,
                        const CensoringModel& g_hat, double clip_floor = 1e-12);

// Fraction of rows not censored by zeta whose observed status (0 if still
// surviving at zeta, else the event label) matches the argmax of the predicted
// vector. Throws if no row is evaluable.
double accuracy_in_time(std::span<const double> probs, const SurvivalDataset& dataset, double zeta);

// Time-dependent concordance for event k at horizon zeta over comparable
// pairs (i with event k at t_i <= zeta; j with t_j > t_i); ties count 0.5.
double c_index_at(std::span<const double> risk, const SurvivalDataset& dataset, double zeta,
                  int event_type);

// Piecewise scoring of the any-event incidence on node_count equal intervals
// of [0, t_max]: -log(F(z_{j+1}) - F(z_j)) for the interval holding an
// uncensored t, -log(1 - F(z_{j+1})) for a censored one; differences floored
// at 1e-15. survival_at_nodes is row-major n x (node_count + 1).
double s_cen_log_simple(std::span<const double> survival_at_nodes, const SurvivalDataset& dataset,
                        int node_count, double t_max);

// Test oracle for the properness of the weighted log-loss: enumerates the
// (K+1)-simplex at grid_step and returns the candidate minimizing the
// analytic expected loss when type-k events occur at event_times[k-1], the
// true censoring law is `censoring`, and the weights use weight_curve
// (defaults to the true law). oracle_probs is [survival, F_1..F_K] at horizon.
std::vector<double> properness_probe(std::span<const double> oracle_probs,
                                     const StepCurve& censoring, double grid_step, double horizon,
                                     std::span<const double> event_times,
                                     const StepCurve* weight_curve = nullptr,
                                     double clip_floor = 1e-12);

struct MetricReport {
  std::vector<double> per_event_ibs;
  double average_ibs = 0.0;
  std::vector<double> horizons;                 // quantile horizons for accuracy / C-index
  std::vector<double> accuracy;                 // one per horizon
  std::vector<std::vector<double>> c_index;     // [event][horizon]
  std::optional<double> s_cen_log_simple;       // any-event, B equal intervals
  int s_cen_nodes = 32;
  double logloss = 0.0;
  double logloss_horizon = 0.0;
  std::optional<double> oracle_ibs;             // present when an oracle is supplied
  std::optional<double> cif_monotonicity;       // sampled-pair diagnostic, model runs only
};

std::string report_to_json(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);

}  // namespace incidence
