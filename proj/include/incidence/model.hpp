#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "incidence/censoring.hpp"
#include "incidence/dataset.hpp"
#include "incidence/gbdt.hpp"
#include "incidence/metrics.hpp"

namespace incidence {

struct TrainConfig {
  double learning_rate = 0.1;   // in (0, 1]
  int n_iter = 100;             // boosting iterations of the event model
  int max_depth = 5;
  int n_time_samples = 1;       // horizon draws per row per iteration
  int n_censoring_warmup = 20;  // censoring-model rounds before the main loop
  double clip_floor = 1e-12;    // floor for IPCW denominators
  std::uint64_t seed = 0;
};

enum class CensoringSource {
  ensemble,     // covariate-dependent boosted censoring model (default)
  marginal_km,  // marginal censoring Kaplan-Meier; no censoring model is fit
  fixed_curve,  // caller-supplied curve; no censoring model is fit
};

struct FitOptions {
  CensoringSource censoring_source = CensoringSource::ensemble;
  const StepCurve* fixed_censoring = nullptr;  // required for fixed_curve
  const BinMapper* bin_mapper = nullptr;       // override; must cover d+1 columns
};

// Probability vector at one horizon: survival + sum(cif) == 1.
struct IncidenceVector {
  double survival = 1.0;
  std::vector<double> cif;
};

// Event model over d+1 inputs (features plus stacked horizon) with K+1
// classes (class 0 = surviving), and a two-class censoring model over the
// same inputs (class 0 = still uncensored). Column d is the horizon.
struct IncidenceModel {
  BoostedEnsemble event_model;
  BoostedEnsemble censoring_model;  // empty when the source was km/fixed
  double t_max = 0.0;
  int n_event_types = 0;
  TrainConfig config;
};

// y_i = event_i if t_i <= horizon_i else 0.
std::vector<int> make_targets(const SurvivalDataset& dataset, std::span<const double> horizons);

// IPCW weights for the event classification at per-row horizons:
//   t_i >  zeta_i            -> 1 / G(zeta_i | x_i)
//   t_i <= zeta_i, event != 0 -> 1 / G(t_i | x_i)
//   otherwise (censored before the horizon) -> 0
// Denominators are clipped from below at clip_floor.
std::vector<double> make_weights(const SurvivalDataset& dataset, std::span<const double> horizons,
                                 const CensoringModel& g_hat, double clip_floor);

// Trains the boosted incidence model: warm-up rounds of the censoring model
// against the event-distribution Kaplan-Meier, then interleaved rounds where
// each event round is reweighted by the current censoring estimate and each
// censoring round by the current event-survival estimate. Horizons are drawn
// uniformly on (0, t_max] per row and replicate, keyed by (seed, round, row,
// replicate), and stacked as feature column d.
IncidenceModel fit(const SurvivalDataset& dataset, const TrainConfig& config,
                   const FitOptions& options = {});

// Softmax of the event-model raw scores at (row, min(horizon, t_max)).
// Horizon 0 short-circuits to the exact vector (survival 1, all CIFs 0).
IncidenceVector predict_incidence(const IncidenceModel& model, std::span<const double> row,
                                  double horizon);

std::vector<IncidenceVector> predict_curves(const IncidenceModel& model,
                                            std::span<const double> row, const TimeGrid& grid);

// P(C > t | x) from the trained censoring model; only valid for
// CensoringSource::ensemble models with at least one censoring round.
double predict_censoring(const IncidenceModel& model, std::span<const double> row, double t);

// Bulk prediction over every (row, horizon) pair, row-major
// (row, horizon, class) with class 0 = survival. Horizons beyond t_max clamp;
// horizon 0 yields the exact boundary vector.
std::vector<double> predict_prob_grid(const IncidenceModel& model, const SurvivalDataset& dataset,
                                      std::span<const double> horizons);

CifGrid model_cif_grid(const IncidenceModel& model, const SurvivalDataset& dataset,
                       const TimeGrid& grid);

// The horizon drawn for (row, replicate) in a global training round (warm-up
// rounds first, then main rounds). Exposed so training draws can be audited.
double training_horizon(std::uint64_t seed, std::uint64_t round_index, std::size_t row,
                        std::size_t replicate, double t_max);

// Fraction of sampled (row, zeta < zeta', event) triples whose predicted CIF
// is non-decreasing up to the tolerance. The model does not enforce
// monotonicity; this is a reporting diagnostic.
double cif_monotonicity_fraction(const IncidenceModel& model, const SurvivalDataset& dataset,
                                 std::size_t n_pairs, std::uint64_t seed,
                                 double tolerance = 0.05);

}  // namespace incidence
