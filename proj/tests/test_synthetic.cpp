#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "incidence/rng.hpp"
#include "incidence/synthetic.hpp"

using namespace incidence;

namespace {

// asymptotic Kolmogorov-Smirnov p-value
double ks_pvalue(double d_stat, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d_stat;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    sum += 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

TEST_CASE("generate with censoring disabled produces only events") {
  SynthConfig cfg;
  cfg.n_samples = 500;
  cfg.n_events = 2;
  cfg.n_features = 4;
  cfg.target_censoring_rate = 0.0;
  cfg.censoring_dependence = 2;
  cfg.seed = 1;
  const SynthResult r = generate(cfg);
  CHECK(r.realized_censoring == 0.0);
  for (std::size_t i = 0; i < r.data.n_rows(); ++i) CHECK(r.data.event(i) != 0);
}

TEST_CASE("generate calibrates the censoring rate to the target") {
  SynthConfig cfg;  // 20k rows, 3 events, dependent censoring on 6 features
  cfg.n_samples = 20000;
  cfg.seed = 2;
  const SynthResult r = generate(cfg);
  CHECK(std::abs(r.realized_censoring - 0.5) <= 0.02);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < r.data.n_rows(); ++i) censored += r.data.event(i) == 0;
  CHECK(static_cast<double>(censored) / 20000.0 == doctest::Approx(r.realized_censoring));
  CHECK(r.data.n_event_types() == 3);
}

TEST_CASE("constant coefficients reduce to a single Weibull law") {
  SynthConfig cfg;
  cfg.n_samples = 10000;
  cfg.n_events = 1;
  cfg.n_features = 2;
  cfg.censoring_dependence = 0;
  cfg.target_censoring_rate = 0.0;
  cfg.seed = 3;
  cfg.shape_coef = {{1.2, 0.0, 0.0}};
  cfg.scale_coef = {{0.9, 0.0, 0.0}};
  cfg.censoring_shape_coef = {1.0};
  cfg.censoring_scale_coef = {1.0};
  const SynthResult r = generate(cfg);

  const WeibullParams p = r.oracle.event_params(r.data.row(0), 0);
  std::vector<double> sorted(r.data.durations().begin(), r.data.durations().end());
  std::sort(sorted.begin(), sorted.end());
  double d_stat = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = 1.0 - std::exp(-std::pow(sorted[i] / p.scale, p.shape));
    d_stat = std::max(d_stat, std::abs(cdf - static_cast<double>(i + 1) / n));
    d_stat = std::max(d_stat, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks_pvalue(d_stat, sorted.size()) > 0.01);
}

TEST_CASE("oracle cif closed-form checks") {
  SynthConfig cfg;
  cfg.n_samples = 10;
  cfg.n_features = 2;
  cfg.censoring_dependence = 0;
  cfg.target_censoring_rate = 0.0;
  cfg.seed = 4;

  SUBCASE("zero horizon has zero incidence") {
    cfg.n_events = 2;
    const SynthResult r = generate(cfg);
    CHECK(r.oracle.cif(r.data.row(0), 0.0, 0) == 0.0);
    CHECK(r.oracle.cif(r.data.row(0), 0.0, 1) == 0.0);
  }
  SUBCASE("a single event matches the Weibull CDF to quadrature tolerance") {
    cfg.n_events = 1;
    cfg.shape_coef = {{0.9, 0.3, -0.2}};
    cfg.scale_coef = {{1.1, 0.4, 0.1}};
    cfg.censoring_shape_coef = {1.0};
    cfg.censoring_scale_coef = {1.0};
    const SynthResult r = generate(cfg);
    for (std::size_t i : {0UL, 3UL, 7UL}) {
      const auto x = r.data.row(i);
      const WeibullParams p = r.oracle.event_params(x, 0);
      for (double zeta : {0.2, 0.7, 1.5, 3.0}) {
        const double closed = 1.0 - std::exp(-std::pow(zeta / p.scale, p.shape));
        CHECK(std::abs(r.oracle.cif(x, zeta, 0) - closed) < 1e-8);
      }
    }
  }
  SUBCASE("two identical events split the total incidence evenly") {
    cfg.n_events = 2;
    cfg.shape_coef = {{1.0, 0.2, -0.1}, {1.0, 0.2, -0.1}};
    cfg.scale_coef = {{0.8, 0.3, 0.2}, {0.8, 0.3, 0.2}};
    cfg.censoring_shape_coef = {1.0};
    cfg.censoring_scale_coef = {1.0};
    const SynthResult r = generate(cfg);
    for (std::size_t i : {1UL, 5UL}) {
      const auto x = r.data.row(i);
      for (double zeta : {0.3, 0.9, 2.0}) {
        const double half = 0.5 * (1.0 - r.oracle.survival(x, zeta));
        CHECK(std::abs(r.oracle.cif(x, zeta, 0) - half) < 1e-6);
        CHECK(std::abs(r.oracle.cif(x, zeta, 1) - half) < 1e-6);
      }
    }
  }
}

TEST_CASE("oracle cifs and survival sum to one at random probes") {
  SynthConfig cfg;
  cfg.n_samples = 100;
  cfg.n_events = 3;
  cfg.n_features = 5;
  cfg.censoring_dependence = 2;
  cfg.target_censoring_rate = 0.4;
  cfg.seed = 5;
  const SynthResult r = generate(cfg);
  for (std::size_t probe = 0; probe < 100; ++probe) {
    const std::size_t i = probe % r.data.n_rows();
    const auto x = r.data.row(i);
    const double zeta = 3.0 * rng::uniform_pos(99, 1, probe, 0);
    double total = r.oracle.survival(x, zeta);
    for (int k = 0; k < 3; ++k) total += r.oracle.cif(x, zeta, k);
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("empirical incidence from a large uncensored draw matches the oracle") {
  SynthConfig cfg;
  cfg.n_samples = 1000000;
  cfg.n_events = 2;
  cfg.n_features = 3;
  cfg.censoring_dependence = 0;
  cfg.target_censoring_rate = 0.0;
  cfg.seed = 6;
  const SynthResult r = generate(cfg);

  // ten probe horizons at event-time quantiles
  const double qs[] = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  const TimeGrid grid = quantile_grid(r.data, qs);

  // oracle marginal estimated on a feature subsample; both sides carry
  // Monte Carlo error, so compare against the combined deviation
  const std::size_t n_sub = 2000;
  std::vector<std::size_t> idx(n_sub);
  for (std::size_t i = 0; i < n_sub; ++i) idx[i] = i;
  const SurvivalDataset sub = r.data.take_rows(idx);
  const CifGrid oracle_vals = r.oracle.cif_grid(sub, grid);

  const double n = static_cast<double>(r.data.n_rows());
  for (std::size_t j = 0; j < grid.horizons.size(); ++j) {
    for (int k = 0; k < 2; ++k) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < r.data.n_rows(); ++i) {
        if (r.data.event(i) == k + 1 && r.data.duration(i) <= grid.horizons[j]) ++hits;
      }
      const double empirical = static_cast<double>(hits) / n;
      double mean = 0.0;
      for (std::size_t i = 0; i < n_sub; ++i) mean += oracle_vals.at(i, j, k);
      mean /= static_cast<double>(n_sub);
      double var = 0.0;
      for (std::size_t i = 0; i < n_sub; ++i) {
        const double dlt = oracle_vals.at(i, j, k) - mean;
        var += dlt * dlt;
      }
      const double se_oracle = std::sqrt(var / static_cast<double>(n_sub - 1) /
                                         static_cast<double>(n_sub));
      const double se_emp = std::sqrt(empirical * (1.0 - empirical) / n);
      const double tol = 3.0 * std::sqrt(se_oracle * se_oracle + se_emp * se_emp);
      CHECK(std::abs(empirical - mean) < tol);
    }
  }
}

TEST_CASE("generator and oracle ibs are deterministic per seed") {
  SynthConfig cfg;
  cfg.n_samples = 300;
  cfg.n_events = 2;
  cfg.n_features = 3;
  cfg.censoring_dependence = 1;
  cfg.target_censoring_rate = 0.3;
  cfg.seed = 7;
  const SynthResult a = generate(cfg);
  const SynthResult b = generate(cfg);
  CHECK(a.realized_censoring == b.realized_censoring);
  for (std::size_t i = 0; i < a.data.n_rows(); ++i) {
    CHECK(a.data.duration(i) == b.data.duration(i));
    CHECK(a.data.event(i) == b.data.event(i));
  }
  const TimeGrid grid = default_ibs_grid(a.data, 40);
  CHECK(oracle_ibs(a.oracle, a.data, grid) == oracle_ibs(b.oracle, b.data, grid));

  cfg.seed = 8;
  const SynthResult c = generate(cfg);
  CHECK(a.data.duration(0) != c.data.duration(0));
}

TEST_CASE("near-deterministic durations give a near-zero oracle ibs") {
  SynthConfig cfg;
  cfg.n_samples = 400;
  cfg.n_events = 1;
  cfg.n_features = 2;
  cfg.censoring_dependence = 0;
  cfg.target_censoring_rate = 0.0;
  cfg.seed = 9;
  cfg.shape_coef = {{60.0, 0.0, 0.0}};  // a very steep Weibull: nearly a point mass
  cfg.scale_coef = {{1.0, 0.0, 0.0}};
  cfg.censoring_shape_coef = {1.0};
  cfg.censoring_scale_coef = {1.0};
  const SynthResult r = generate(cfg);
  const TimeGrid grid = uniform_grid(0.05, 2.5, 100);
  CHECK(oracle_ibs(r.oracle, r.data, grid) < 0.03);
}
