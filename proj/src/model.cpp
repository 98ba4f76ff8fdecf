#include "incidence/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incidence/marginal.hpp"
#include "incidence/parallel.hpp"
#include "incidence/rng.hpp"

namespace incidence {

namespace {

constexpr std::uint64_t kZetaStream = 0x5A17AC0DE0000000ULL;  // + global round index
constexpr double kFitMinSplitGain = 5.0;

void validate_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0)) {
    throw std::invalid_argument("learning_rate must lie in (0, 1]");
  }
  if (cfg.n_iter < 1) throw std::invalid_argument("n_iter must be at least 1");
  if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
  if (cfg.n_time_samples < 1) throw std::invalid_argument("n_time_samples must be at least 1");
  if (cfg.n_censoring_warmup < 0) throw std::invalid_argument("n_censoring_warmup must be >= 0");
  if (!(cfg.clip_floor > 0.0 && cfg.clip_floor < 1.0)) {
    throw std::invalid_argument("clip_floor must lie in (0, 1)");
  }
}

// The three IPCW branches of the training weights. For the event model,
// event_label == 0 marks the rows whose outcome is lost (censored before the
// horizon); for the censoring model the roles are swapped by the caller.
inline double branch_weight(double t_i, bool outcome_observed, double zeta, double g_at_zeta,
                            double g_at_t, double clip) {
  if (t_i > zeta) return 1.0 / std::max(g_at_zeta, clip);
  if (outcome_observed) return 1.0 / std::max(g_at_t, clip);
  return 0.0;
}

inline double class0_prob(const double* raw, int n_classes) {
  double max_s = raw[0];
  for (int c = 1; c < n_classes; ++c) max_s = std::max(max_s, raw[c]);
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) total += std::exp(raw[c] - max_s);
  return std::exp(raw[0] - max_s) / total;
}

}  // namespace

std::vector<int> make_targets(const SurvivalDataset& dataset, std::span<const double> horizons) {
  if (horizons.size() != dataset.n_rows()) {
    throw std::invalid_argument("make_targets: one horizon per row required");
  }
  std::vector<int> targets(dataset.n_rows());
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    targets[i] = dataset.duration(i) <= horizons[i] ? dataset.event(i) : 0;
  }
  return targets;
}

std::vector<double> make_weights(const SurvivalDataset& dataset, std::span<const double> horizons,
                                 const CensoringModel& g_hat, double clip_floor) {
  if (horizons.size() != dataset.n_rows()) {
    throw std::invalid_argument("make_weights: one horizon per row required");
  }
  std::vector<double> weights(dataset.n_rows());
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    const auto row = dataset.row(i);
    const double t = dataset.duration(i);
    weights[i] = branch_weight(t, dataset.event(i) != 0, horizons[i],
                               g_hat.remaining_before(row, horizons[i]),
                               g_hat.remaining_before(row, t), clip_floor);
  }
  return weights;
}

IncidenceModel fit(const SurvivalDataset& dataset, const TrainConfig& config,
                   const FitOptions& options) {
  validate_config(config);
  const std::size_t n = dataset.n_rows();
  const std::size_t d = dataset.n_features();
  const int k_types = dataset.n_event_types();
  const int n_event_classes = k_types + 1;
  const double t_max = dataset.max_duration();
  const double clip = config.clip_floor;

  BinMapper mapper;
  if (options.bin_mapper != nullptr) {
    if (options.bin_mapper->n_columns() != static_cast<int>(d) + 1) {
      throw std::invalid_argument("fit: bin mapper must cover the features plus the horizon");
    }
    mapper = *options.bin_mapper;
  } else {
    mapper = fit_bins(dataset.features(), n, d);
    mapper.append_uniform_column(0.0, t_max);
  }

  const bool train_censoring = options.censoring_source == CensoringSource::ensemble;
  const StepCurve* fixed_curve = nullptr;
  StepCurve km_censoring;
  StepCurve km_event_survival;
  if (options.censoring_source == CensoringSource::fixed_curve) {
    if (options.fixed_censoring == nullptr) {
      throw std::invalid_argument("fit: fixed_curve source needs a censoring curve");
    }
    fixed_curve = options.fixed_censoring;
  } else if (options.censoring_source == CensoringSource::marginal_km) {
    km_censoring = censoring_km(dataset);
    fixed_curve = &km_censoring;
  } else {
    std::vector<bool> observed(n);
    for (std::size_t i = 0; i < n; ++i) observed[i] = dataset.event(i) != 0;
    km_event_survival = kaplan_meier(dataset.durations(), observed);
  }

  IncidenceModel model;
  model.t_max = t_max;
  model.n_event_types = k_types;
  model.config = config;
  model.event_model = {n_event_classes, config.learning_rate,
                       std::vector<double>(n_event_classes, 0.0), mapper, {}};
  model.censoring_model = {2, config.learning_rate, std::vector<double>(2, 0.0), mapper, {}};

  // min_child_hessian 5.0 is the hessian-mass analogue of a ~20-row leaf
  // minimum (multiclass hessians are about 0.25 per unit weight); the gain
  // threshold keeps post-convergence rounds from stacking pure-noise splits.
  // Both depend only on weighted sums, so zero-weight rows stay invisible.
  TreeGrowConfig grow;
  grow.max_depth = config.max_depth;
  grow.min_child_hessian = 5.0;
  grow.min_split_gain = kFitMinSplitGain;

  // binned (x_i, t_i) rows, fixed for the whole fit; raw-score caches on them
  // are advanced incrementally as rounds are appended
  const int time_col = static_cast<int>(d);
  BinnedMatrix at_duration;
  at_duration.n_rows = n;
  at_duration.n_cols = static_cast<int>(d) + 1;
  at_duration.bins.resize(n * (d + 1));
  at_duration.col_bins.resize(d + 1);
  for (std::size_t c = 0; c <= d; ++c) {
    at_duration.col_bins[c] = mapper.n_bins(static_cast<int>(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dataset.row(i);
    std::uint8_t* out = at_duration.row_mut(i);
    for (std::size_t c = 0; c < d; ++c) {
      out[c] = static_cast<std::uint8_t>(mapper.bin(static_cast<int>(c), row[c]));
    }
    out[time_col] = static_cast<std::uint8_t>(mapper.bin(time_col, dataset.duration(i)));
  }
  std::vector<double> event_raw_at_t(n * n_event_classes, 0.0);
  std::vector<double> cens_raw_at_t(n * 2, 0.0);

  // time-stacked training block: n_time_samples replicates of every row,
  // replicate-major so draw keys stay (row, replicate)
  const std::size_t reps = static_cast<std::size_t>(config.n_time_samples);
  const std::size_t n2 = n * reps;
  BinnedMatrix stacked;
  stacked.n_rows = n2;
  stacked.n_cols = static_cast<int>(d) + 1;
  stacked.bins.resize(n2 * (d + 1));
  stacked.col_bins = at_duration.col_bins;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(at_duration.row(i), d, stacked.row_mut(rep * n + i));
    }
  }

  std::vector<double> zetas(n2);
  std::vector<int> targets(n2);
  std::vector<double> weights(n2);
  std::vector<double> event_raw_z(n2 * n_event_classes);
  std::vector<double> cens_raw_z(n2 * 2);

  std::uint64_t round_tag = 0;
  const auto draw_horizons = [&](std::uint64_t tag) {
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t i = 0; i < n; ++i) {
        const double z = training_horizon(config.seed, tag, i, rep, t_max);
        const std::size_t j = rep * n + i;
        zetas[j] = z;
        stacked.row_mut(j)[time_col] = static_cast<std::uint8_t>(mapper.bin(time_col, z));
      }
    }
  };

  const auto check_finite = [&](std::span<const double> raw, const char* which, int round) {
    double s = 0.0;
    for (double v : raw) s += v;
    if (!std::isfinite(s)) {
      throw std::runtime_error(std::string("fit: non-finite ") + which + " scores at round " +
                               std::to_string(round));
    }
  };

  // warm-up: censoring model as a binary classifier of "still uncensored at
  // zeta", reweighted by the event-distribution Kaplan-Meier (roles swapped)
  if (train_censoring) {
    for (int w = 0; w < config.n_censoring_warmup; ++w) {
      draw_horizons(round_tag++);
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t i = j % n;
        const double t = dataset.duration(i);
        const bool censored = dataset.event(i) == 0;
        targets[j] = (t <= zetas[j] && censored) ? 1 : 0;
        weights[j] = branch_weight(t, censored, zetas[j],
                                   km_event_survival.before(zetas[j]),
                                   km_event_survival.before(t), clip);
      }
      predict_raw_all(model.censoring_model, stacked, cens_raw_z);
      check_finite(cens_raw_z, "censoring", w);
      const auto trees =
          boost_round(model.censoring_model, stacked, targets, weights, cens_raw_z, grow);
      add_round_scores(model.censoring_model, trees, at_duration, cens_raw_at_t);
    }
  }

  for (int m = 0; m < config.n_iter; ++m) {
    draw_horizons(round_tag++);
    predict_raw_all(model.event_model, stacked, event_raw_z);
    check_finite(event_raw_z, "event", m);
    if (train_censoring) {
      predict_raw_all(model.censoring_model, stacked, cens_raw_z);
      check_finite(cens_raw_z, "censoring", m);
    }

    // event round, reweighted by the current censoring estimate
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t i = j % n;
      const double t = dataset.duration(i);
      const int label = dataset.event(i);
      const double z = zetas[j];
      targets[j] = t <= z ? label : 0;
      double g_at_z, g_at_t;
      if (train_censoring) {
        g_at_z = class0_prob(&cens_raw_z[j * 2], 2);
        g_at_t = class0_prob(&cens_raw_at_t[i * 2], 2);
      } else {
        g_at_z = fixed_curve->before(z);
        g_at_t = fixed_curve->before(t);
      }
      weights[j] = branch_weight(t, label != 0, z, g_at_z, g_at_t, clip);
    }
    const auto trees =
        boost_round(model.event_model, stacked, targets, weights, event_raw_z, grow);
    add_round_scores(model.event_model, trees, stacked, event_raw_z);
    add_round_scores(model.event_model, trees, at_duration, event_raw_at_t);

    // censoring feedback round, reweighted by the post-update survival
    if (train_censoring) {
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t i = j % n;
        const double t = dataset.duration(i);
        const bool censored = dataset.event(i) == 0;
        const double z = zetas[j];
        targets[j] = (t <= z && censored) ? 1 : 0;
        const double s_at_z = class0_prob(&event_raw_z[j * n_event_classes], n_event_classes);
        const double s_at_t = class0_prob(&event_raw_at_t[i * n_event_classes], n_event_classes);
        weights[j] = branch_weight(t, censored, z, s_at_z, s_at_t, clip);
      }
      const auto cens_trees =
          boost_round(model.censoring_model, stacked, targets, weights, cens_raw_z, grow);
      add_round_scores(model.censoring_model, cens_trees, at_duration, cens_raw_at_t);
    }
  }

  return model;
}

namespace {

void validate_predict_row(const IncidenceModel& model, std::span<const double> row,
                          double horizon) {
  if (static_cast<int>(row.size()) + 1 != model.event_model.bins.n_columns()) {
    throw std::invalid_argument("predict: expected " +
                                std::to_string(model.event_model.bins.n_columns() - 1) +
                                " features, got " + std::to_string(row.size()));
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("predict: horizon must be finite and non-negative");
  }
  for (double v : row) {
    if (!std::isfinite(v)) throw std::invalid_argument("predict: features must be finite");
  }
}

}  // namespace

IncidenceVector predict_incidence(const IncidenceModel& model, std::span<const double> row,
                                  double horizon) {
  validate_predict_row(model, row, horizon);
  const int k_types = model.n_event_types;
  if (horizon == 0.0) {
    // nothing can have happened yet; do not trust the model at the boundary
    return {1.0, std::vector<double>(k_types, 0.0)};
  }
  std::vector<double> stacked(row.begin(), row.end());
  stacked.push_back(std::min(horizon, model.t_max));
  const std::vector<double> raw = model.event_model.predict_raw(stacked);
  std::vector<double> probs(raw.size());
  softmax_probs(raw, probs);
  IncidenceVector out;
  out.survival = probs[0];
  out.cif.assign(probs.begin() + 1, probs.end());
  return out;
}

std::vector<IncidenceVector> predict_curves(const IncidenceModel& model,
                                            std::span<const double> row, const TimeGrid& grid) {
  std::vector<IncidenceVector> out;
  out.reserve(grid.horizons.size());
  for (double h : grid.horizons) out.push_back(predict_incidence(model, row, h));
  return out;
}

double predict_censoring(const IncidenceModel& model, std::span<const double> row, double t) {
  if (model.censoring_model.n_rounds() == 0) {
    throw std::runtime_error("predict_censoring: model has no trained censoring rounds");
  }
  validate_predict_row(model, row, t);
  std::vector<double> stacked(row.begin(), row.end());
  stacked.push_back(std::min(t, model.t_max));
  const std::vector<double> raw = model.censoring_model.predict_raw(stacked);
  return class0_prob(raw.data(), 2);
}

std::vector<double> predict_prob_grid(const IncidenceModel& model, const SurvivalDataset& dataset,
                                      std::span<const double> horizons) {
  const std::size_t n = dataset.n_rows();
  const std::size_t d = dataset.n_features();
  if (static_cast<int>(d) + 1 != model.event_model.bins.n_columns()) {
    throw std::invalid_argument("predict: dataset feature count does not match the model");
  }
  const int n_classes = model.n_event_types + 1;
  const std::size_t m = horizons.size();
  const BinMapper& mapper = model.event_model.bins;
  const int time_col = static_cast<int>(d);

  std::vector<std::uint8_t> time_bins(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double h = horizons[j];
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw std::invalid_argument("predict: horizons must be finite and non-negative");
    }
    time_bins[j] = static_cast<std::uint8_t>(mapper.bin(time_col, std::min(h, model.t_max)));
  }

  std::vector<double> out(n * m * n_classes);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint8_t> binned(d + 1);
    std::vector<double> raw(n_classes);
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = dataset.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        binned[c] = static_cast<std::uint8_t>(mapper.bin(static_cast<int>(c), row[c]));
      }
      for (std::size_t j = 0; j < m; ++j) {
        double* slot = &out[(i * m + j) * n_classes];
        if (horizons[j] == 0.0) {
          slot[0] = 1.0;
          for (int c = 1; c < n_classes; ++c) slot[c] = 0.0;
          continue;
        }
        binned[time_col] = time_bins[j];
        model.event_model.predict_raw_binned(binned.data(), raw);
        softmax_probs(raw, std::span<double>(slot, n_classes));
      }
    }
  }, /*grain=*/64);
  return out;
}

double training_horizon(std::uint64_t seed, std::uint64_t round_index, std::size_t row,
                        std::size_t replicate, double t_max) {
  return t_max * rng::uniform_pos(seed, kZetaStream + round_index, row, replicate);
}

double cif_monotonicity_fraction(const IncidenceModel& model, const SurvivalDataset& dataset,
                                 std::size_t n_pairs, std::uint64_t seed, double tolerance) {
  if (n_pairs == 0) throw std::invalid_argument("cif_monotonicity_fraction: n_pairs must be > 0");
  constexpr std::uint64_t kPairStream = 0xD1A6000000000000ULL;
  std::size_t ok = 0;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const std::size_t i =
        rng::counter_hash(seed, kPairStream, p, 0) % dataset.n_rows();
    const int k = static_cast<int>(rng::counter_hash(seed, kPairStream, p, 1) %
                                   static_cast<std::uint64_t>(model.n_event_types));
    double z1 = model.t_max * rng::uniform_pos(seed, kPairStream, p, 2);
    double z2 = model.t_max * rng::uniform_pos(seed, kPairStream, p, 3);
    if (z1 > z2) std::swap(z1, z2);
    const IncidenceVector early = predict_incidence(model, dataset.row(i), z1);
    const IncidenceVector late = predict_incidence(model, dataset.row(i), z2);
    if (early.cif[k] <= late.cif[k] + tolerance) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(n_pairs);
}

CifGrid model_cif_grid(const IncidenceModel& model, const SurvivalDataset& dataset,
                       const TimeGrid& grid) {
  const std::vector<double> probs = predict_prob_grid(model, dataset, grid.horizons);
  const int k_types = model.n_event_types;
  const std::size_t m = grid.horizons.size();
  CifGrid out = CifGrid::zeros(dataset.n_rows(), m, k_types);
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double* slot = &probs[(i * m + j) * (k_types + 1)];
      for (int k = 0; k < k_types; ++k) out.at(i, j, k) = slot[k + 1];
    }
  }
  return out;
}

}  // namespace incidence
