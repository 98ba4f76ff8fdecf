#include "incidence/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "incidence/parallel.hpp"
#include "incidence/rng.hpp"

namespace incidence {

namespace {

constexpr std::uint64_t kFeatureStream = 1;
constexpr std::uint64_t kEventStream = 2;
constexpr std::uint64_t kCensoringStream = 3;
constexpr std::uint64_t kCoefStream = 4;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// parameter = softplus(linear(x)) + 0.1, bounded away from zero
double positive_link(std::span<const double> coef, std::span<const double> x, std::size_t n_inputs) {
  double lin = coef[0];
  for (std::size_t j = 0; j < n_inputs; ++j) lin += coef[j + 1] * x[j];
  return softplus(lin) + 0.1;
}

std::vector<double> default_coef(std::uint64_t seed, std::uint64_t tag, std::size_t n_inputs,
                                 double bias, double weight_scale) {
  std::vector<double> coef(n_inputs + 1);
  coef[0] = bias;
  const double per_coord = n_inputs > 0 ? weight_scale / std::sqrt(static_cast<double>(n_inputs)) : 0.0;
  for (std::size_t j = 0; j < n_inputs; ++j) {
    coef[j + 1] = per_coord * rng::normal(seed, kCoefStream, tag, j);
  }
  return coef;
}

SynthConfig resolve(const SynthConfig& config) {
  if (config.n_samples == 0) throw std::invalid_argument("generate: n_samples must be positive");
  if (config.n_events < 1) throw std::invalid_argument("generate: n_events must be at least 1");
  if (config.n_features < 1) throw std::invalid_argument("generate: n_features must be at least 1");
  if (config.censoring_dependence < 0 || config.censoring_dependence > config.n_features) {
    throw std::invalid_argument("generate: censoring_dependence must lie in [0, n_features]");
  }
  if (!(config.target_censoring_rate >= 0.0 && config.target_censoring_rate < 1.0)) {
    throw std::invalid_argument("generate: target_censoring_rate must lie in [0, 1)");
  }

  SynthConfig r = config;
  const std::size_t d = static_cast<std::size_t>(r.n_features);
  const std::size_t cd = static_cast<std::size_t>(r.censoring_dependence);
  if (r.shape_coef.empty()) {
    for (int k = 0; k < r.n_events; ++k) {
      r.shape_coef.push_back(default_coef(r.seed, 2 * k, d, 1.0, 0.45));
    }
  }
  if (r.scale_coef.empty()) {
    for (int k = 0; k < r.n_events; ++k) {
      r.scale_coef.push_back(default_coef(r.seed, 2 * k + 1, d, 0.4 + 0.6 * k, 1.1));
    }
  }
  if (r.censoring_shape_coef.empty()) {
    r.censoring_shape_coef = default_coef(r.seed, 1000, cd, 1.0, 0.3);
  }
  if (r.censoring_scale_coef.empty()) {
    r.censoring_scale_coef = default_coef(r.seed, 1001, cd, 1.0, 0.6);
  }

  if (r.shape_coef.size() != static_cast<std::size_t>(r.n_events) ||
      r.scale_coef.size() != static_cast<std::size_t>(r.n_events)) {
    throw std::invalid_argument("generate: need one shape/scale coefficient row per event");
  }
  for (int k = 0; k < r.n_events; ++k) {
    if (r.shape_coef[k].size() != d + 1 || r.scale_coef[k].size() != d + 1) {
      throw std::invalid_argument("generate: event coefficient rows must have 1 + n_features entries");
    }
  }
  if (r.censoring_shape_coef.size() != cd + 1 || r.censoring_scale_coef.size() != cd + 1) {
    throw std::invalid_argument("generate: censoring coefficients must have 1 + censoring_dependence entries");
  }
  return r;
}

// adaptive Simpson with absolute tolerance
double adaptive_simpson(const std::function<double(double)>& f, double a, double m, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol) {
    return split + (split - whole) / 15.0;
  }
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

SynthOracle::SynthOracle(SynthConfig resolved_config, double censoring_scale_multiplier)
    : config_(std::move(resolved_config)), censoring_multiplier_(censoring_scale_multiplier) {}

WeibullParams SynthOracle::event_params(std::span<const double> x, int k) const {
  const std::size_t d = static_cast<std::size_t>(config_.n_features);
  return {positive_link(config_.shape_coef[k], x, d), positive_link(config_.scale_coef[k], x, d)};
}

WeibullParams SynthOracle::censoring_params(std::span<const double> x) const {
  const std::size_t cd = static_cast<std::size_t>(config_.censoring_dependence);
  return {positive_link(config_.censoring_shape_coef, x, cd),
          censoring_multiplier_ * positive_link(config_.censoring_scale_coef, x, cd)};
}

double SynthOracle::survival(std::span<const double> x, double zeta) const {
  if (zeta <= 0.0) return 1.0;
  double hazard = 0.0;
  for (int k = 0; k < config_.n_events; ++k) {
    const WeibullParams p = event_params(x, k);
    hazard += std::pow(zeta / p.scale, p.shape);
  }
  return std::exp(-hazard);
}

namespace {

// Integrand of F*_k after substituting u = zeta_ref * t^gamma with
// gamma = max(1, 1 / min shape): bounded on [0, 1] even for shapes below 1.
struct CifIntegrand {
  std::vector<WeibullParams> params;
  int k = 0;
  double zeta_ref = 1.0;
  double gamma = 1.0;

  double operator()(double t) const {
    // >= 0 by construction of gamma; clamp away rounding so pow(0, .) stays finite
    const double exp_k = std::max(gamma * params[k].shape - 1.0, 0.0);
    const double ratio_k = zeta_ref / params[k].scale;
    double value = gamma * params[k].shape * std::pow(ratio_k, params[k].shape) *
                   (exp_k == 0.0 ? 1.0 : std::pow(t, exp_k));
    double hazard = 0.0;
    for (std::size_t j = 0; j < params.size(); ++j) {
      hazard += std::pow(zeta_ref * std::pow(t, gamma) / params[j].scale, params[j].shape);
    }
    return value * std::exp(-hazard);
  }
};

CifIntegrand make_integrand(const SynthOracle& oracle, std::span<const double> x, int k,
                            double zeta_ref) {
  CifIntegrand g;
  g.k = k;
  g.zeta_ref = zeta_ref;
  double min_shape = std::numeric_limits<double>::infinity();
  for (int j = 0; j < oracle.config().n_events; ++j) {
    g.params.push_back(oracle.event_params(x, j));
    min_shape = std::min(min_shape, g.params.back().shape);
  }
  g.gamma = std::max(1.0, 1.0 / min_shape);
  return g;
}

}  // namespace

double SynthOracle::cif(std::span<const double> x, double zeta, int k) const {
  if (k < 0 || k >= config_.n_events) throw std::invalid_argument("cif: event index out of range");
  if (zeta <= 0.0) return 0.0;
  const CifIntegrand g = make_integrand(*this, x, k, zeta);
  return integrate([&g](double t) { return g(t); }, 0.0, 1.0, 1e-8);
}

CifGrid SynthOracle::cif_grid(const SurvivalDataset& dataset, const TimeGrid& grid) const {
  const std::size_t m = grid.horizons.size();
  const int k_types = config_.n_events;
  CifGrid out = CifGrid::zeros(dataset.n_rows(), m, k_types);
  if (m == 0) return out;
  const double zeta_ref = grid.horizons.back();

  parallel_for(dataset.n_rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = dataset.row(i);
      for (int k = 0; k < k_types; ++k) {
        if (zeta_ref <= 0.0) continue;
        const CifIntegrand g = make_integrand(*this, x, k, zeta_ref);
        double acc = 0.0;
        double t_prev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double zeta = std::min(grid.horizons[j], zeta_ref);
          const double t_j = zeta <= 0.0 ? 0.0 : std::pow(zeta / zeta_ref, 1.0 / g.gamma);
          acc += integrate([&g](double t) { return g(t); }, t_prev, t_j, 1e-9);
          out.at(i, j, k) = acc;
          t_prev = t_j;
        }
      }
    }
  }, /*grain=*/16);
  return out;
}

double SynthOracle::censoring_remaining(std::span<const double> x, double t) const {
  if (t <= 0.0) return 1.0;
  if (config_.target_censoring_rate == 0.0) return 1.0;
  const WeibullParams p = censoring_params(x);
  return std::exp(-std::pow(t / p.scale, p.shape));
}

StepCurve SynthOracle::censoring_curve(std::span<const double> x, const TimeGrid& grid) const {
  StepCurve curve;
  curve.value_at_zero = 1.0;
  for (double h : grid.horizons) {
    if (h <= 0.0) continue;
    curve.times.push_back(h);
    curve.values.push_back(censoring_remaining(x, h));
  }
  return curve;
}

SynthResult generate(const SynthConfig& config) {
  const SynthConfig resolved = resolve(config);
  const std::size_t n = resolved.n_samples;
  const std::size_t d = static_cast<std::size_t>(resolved.n_features);
  const int k_types = resolved.n_events;

  std::vector<double> features(n * d);
  std::vector<double> latent_min(n);       // T*
  std::vector<int> latent_argmin(n);       // Delta*
  std::vector<double> censor_base(n);      // censoring draw before the scale multiplier

  SynthOracle unit(resolved, 1.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        features[i * d + j] = rng::normal(resolved.seed, kFeatureStream, i, j);
      }
      const std::span<const double> x(&features[i * d], d);
      double t_min = std::numeric_limits<double>::infinity();
      int argmin = 0;
      for (int k = 0; k < k_types; ++k) {
        const WeibullParams p = unit.event_params(x, k);
        const double t = rng::weibull(rng::uniform_pos(resolved.seed, kEventStream, i, k),
                                      p.shape, p.scale);
        if (t < t_min) {  // ties keep the lowest event index
          t_min = t;
          argmin = k;
        }
      }
      latent_min[i] = t_min;
      latent_argmin[i] = argmin;
      const WeibullParams pc = unit.censoring_params(x);
      censor_base[i] = rng::weibull(rng::uniform_pos(resolved.seed, kCensoringStream, i, 0),
                                    pc.shape, pc.scale);
    }
  });

  // calibrate the censoring scale multiplier by geometric bisection
  double multiplier = std::numeric_limits<double>::infinity();
  double realized = 0.0;
  if (resolved.target_censoring_rate > 0.0) {
    const auto rate_at = [&](double mult) {
      std::size_t censored = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mult * censor_base[i] < latent_min[i]) ++censored;
      }
      return static_cast<double>(censored) / static_cast<double>(n);
    };
    double lo = 0x1.0p-40, hi = 0x1.0p40;
    multiplier = 1.0;
    realized = rate_at(multiplier);
    for (int it = 0; it < 200 && std::abs(realized - resolved.target_censoring_rate) > 0.005; ++it) {
      if (realized > resolved.target_censoring_rate) {
        lo = multiplier;  // too much censoring: push censoring times out
      } else {
        hi = multiplier;
      }
      multiplier = std::sqrt(lo * hi);
      realized = rate_at(multiplier);
    }
    if (std::abs(realized - resolved.target_censoring_rate) > 0.02) {
      throw std::runtime_error("generate: censoring calibration failed to reach the target rate");
    }
  }

  std::vector<double> durations(n);
  std::vector<int> events(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = resolved.target_censoring_rate > 0.0
                         ? multiplier * censor_base[i]
                         : std::numeric_limits<double>::infinity();
    if (latent_min[i] <= c) {  // the event wins ties
      durations[i] = latent_min[i];
      events[i] = latent_argmin[i] + 1;
    } else {
      durations[i] = c;
      events[i] = 0;
    }
  }

  SurvivalDataset data(std::move(features), d, std::move(durations), std::move(events), k_types);
  return SynthResult{std::move(data), SynthOracle(resolved, multiplier), realized};
}

double oracle_ibs(const SynthOracle& oracle, const SurvivalDataset& dataset,
                  const TimeGrid& grid) {
  const CifGrid predictions = oracle.cif_grid(dataset, grid);
  const OracleCensoring g(oracle);
  return integrated_brier(predictions, dataset, grid, g).average;
}

std::string oracle_to_json(const SynthOracle& oracle, double realized_censoring) {
  const SynthConfig& c = oracle.config();
  nlohmann::json j;
  j["format"] = "incidence-oracle";
  j["version"] = 1;
  j["n_samples"] = c.n_samples;
  j["n_events"] = c.n_events;
  j["n_features"] = c.n_features;
  j["censoring_dependence"] = c.censoring_dependence;
  j["target_censoring_rate"] = c.target_censoring_rate;
  j["seed"] = c.seed;
  j["shape_coef"] = c.shape_coef;
  j["scale_coef"] = c.scale_coef;
  j["censoring_shape_coef"] = c.censoring_shape_coef;
  j["censoring_scale_coef"] = c.censoring_scale_coef;
  // JSON has no infinity; a disabled-censoring multiplier round-trips via 0
  const double multiplier = oracle.censoring_scale_multiplier();
  j["censoring_scale_multiplier"] = std::isfinite(multiplier) ? multiplier : 0.0;
  j["realized_censoring"] = realized_censoring;
  return j.dump(2) + "\n";
}

SynthOracle oracle_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("format") || j.at("format").get<std::string>() != "incidence-oracle") {
    throw std::runtime_error("oracle file: unrecognized format");
  }
  SynthConfig c;
  c.n_samples = j.at("n_samples").get<std::size_t>();
  c.n_events = j.at("n_events").get<int>();
  c.n_features = j.at("n_features").get<int>();
  c.censoring_dependence = j.at("censoring_dependence").get<int>();
  c.target_censoring_rate = j.at("target_censoring_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shape_coef = j.at("shape_coef").get<std::vector<std::vector<double>>>();
  c.scale_coef = j.at("scale_coef").get<std::vector<std::vector<double>>>();
  c.censoring_shape_coef = j.at("censoring_shape_coef").get<std::vector<double>>();
  c.censoring_scale_coef = j.at("censoring_scale_coef").get<std::vector<double>>();
  double multiplier = j.at("censoring_scale_multiplier").get<double>();
  if (c.target_censoring_rate == 0.0 || multiplier == 0.0) {
    multiplier = std::numeric_limits<double>::infinity();
  }
  return SynthOracle(std::move(c), multiplier);
}

}  // namespace incidence
