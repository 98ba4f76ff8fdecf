#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "incidence/csv.hpp"
#include "incidence/dataset.hpp"

using namespace incidence;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "tmp_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv maps columns and infers the event count") {
  const std::string path = write_temp("basic.csv",
                                      "a,duration,b,event\n"
                                      "0.5,1.0,2.0,1\n"
                                      "1.5,2.0,3.0,0\n"
                                      "2.5,3.0,4.0,2\n");
  const SurvivalDataset ds = load_csv(path);
  CHECK(ds.n_rows() == 3);
  CHECK(ds.n_features() == 2);
  CHECK(ds.n_event_types() == 2);
  CHECK(ds.duration(0) == 1.0);
  CHECK(ds.duration(2) == 3.0);
  CHECK(ds.event(0) == 1);
  CHECK(ds.event(1) == 0);
  CHECK(ds.event(2) == 2);
  CHECK(ds.feature_names()[0] == "a");
  CHECK(ds.feature_names()[1] == "b");
  CHECK(ds.row(1)[0] == 1.5);
  CHECK(ds.row(1)[1] == 3.0);
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects bad rows with a descriptive error") {
  const std::string zero = write_temp("zero.csv", "x,duration,event\n1,0.0,1\n");
  CHECK_THROWS_WITH_AS(load_csv(zero), doctest::Contains("duration must be strictly positive"),
                       std::runtime_error);
  std::remove(zero.c_str());

  const std::string neg = write_temp("neg.csv", "x,duration,event\n1,1.0,1\n2,2.0,-1\n");
  CHECK_THROWS_WITH_AS(load_csv(neg), doctest::Contains("row 2"), std::runtime_error);
  std::remove(neg.c_str());

  const std::string txt = write_temp("txt.csv", "x,duration,event\n1,1.0,1\noops,2.0,1\n");
  CHECK_THROWS_WITH_AS(load_csv(txt), doctest::Contains("non-numeric"), std::runtime_error);
  std::remove(txt.c_str());

  const std::string missing = write_temp("missing.csv", "x,time,event\n1,1.0,1\n");
  CHECK_THROWS_WITH_AS(load_csv(missing), doctest::Contains("missing column 'duration'"),
                       std::runtime_error);
  std::remove(missing.c_str());
}

TEST_CASE("save_csv then load_csv is the identity on numeric content") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 60, d = 4;
  std::vector<double> features(n * d);
  std::vector<double> durations(n);
  std::vector<int> events(n);
  for (std::size_t i = 0; i < n; ++i) {
    durations[i] = 1e-6 + 5.0 * u(gen);
    events[i] = static_cast<int>(gen() % 3);
    for (std::size_t j = 0; j < d; ++j) features[i * d + j] = 10.0 * (u(gen) - 0.5) / 3.0;
  }
  const SurvivalDataset ds(features, d, durations, events, 2);

  const std::string path = "tmp_roundtrip.csv";
  save_csv(ds, path);
  const SurvivalDataset back = load_csv(path);
  REQUIRE(back.n_rows() == n);
  REQUIRE(back.n_features() == d);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(back.duration(i) == ds.duration(i));
    CHECK(back.event(i) == ds.event(i));
    for (std::size_t j = 0; j < d; ++j) CHECK(back.row(i)[j] == ds.row(i)[j]);
  }
  std::remove(path.c_str());
}

TEST_CASE("quantile_grid uses nearest-rank quantiles of observed event times") {
  SUBCASE("median of four observed rows") {
    const SurvivalDataset ds({0, 0, 0, 0}, 1, {1, 2, 3, 4}, {1, 1, 1, 1});
    const double qs[] = {0.5};
    const TimeGrid grid = quantile_grid(ds, qs);
    REQUIRE(grid.horizons.size() == 1);
    CHECK(grid.horizons[0] == 2.0);
    CHECK(grid.t_max == 4.0);
  }
  SUBCASE("all rows censored is an error") {
    const SurvivalDataset ds({0, 0, 0, 0}, 1, {1, 2, 3, 4}, {0, 0, 0, 0});
    const double qs[] = {0.5};
    CHECK_THROWS_WITH_AS(quantile_grid(ds, qs), doctest::Contains("no observed events"),
                         std::runtime_error);
  }
  SUBCASE("quartiles of 1..100") {
    std::vector<double> durations(100);
    std::vector<int> events(100, 1);
    std::vector<double> feats(100, 0.0);
    for (int i = 0; i < 100; ++i) durations[i] = i + 1;
    const SurvivalDataset ds(feats, 1, durations, events);
    const double qs[] = {0.25, 0.5, 0.75};
    const TimeGrid grid = quantile_grid(ds, qs);
    REQUIRE(grid.horizons.size() == 3);
    CHECK(grid.horizons[0] == 25.0);
    CHECK(grid.horizons[1] == 50.0);
    CHECK(grid.horizons[2] == 75.0);
  }
}

TEST_CASE("quantile_grid output is strictly increasing and within range") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + gen() % 50;
    std::vector<double> durations(n);
    std::vector<int> events(n);
    std::vector<double> feats(n, 0.0);
    double min_event = 1e300;
    bool any_event = false;
    for (std::size_t i = 0; i < n; ++i) {
      durations[i] = 0.1 + 3.0 * u(gen);
      events[i] = static_cast<int>(gen() % 3);
      if (events[i] != 0) {
        any_event = true;
        min_event = std::min(min_event, durations[i]);
      }
    }
    if (!any_event) continue;
    const SurvivalDataset ds(feats, 1, durations, events);
    const double qs[] = {0.1, 0.4, 0.7, 0.9};
    const TimeGrid grid = quantile_grid(ds, qs);
    for (std::size_t j = 0; j < grid.horizons.size(); ++j) {
      CHECK(grid.horizons[j] >= min_event);
      CHECK(grid.horizons[j] <= grid.t_max);
      if (j > 0) CHECK(grid.horizons[j] > grid.horizons[j - 1]);
    }
  }
}

TEST_CASE("dataset validation catches domain violations") {
  CHECK_THROWS_AS(SurvivalDataset({0.0}, 1, {0.0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalDataset({0.0}, 1, {1.0}, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalDataset({0.0, 0.0}, 1, {1.0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalDataset({0.0}, 1, {1.0}, {3}, 2), std::invalid_argument);
  // all-censored data still forms a valid one-event dataset
  const SurvivalDataset ds({0.0, 0.0}, 1, {1.0, 2.0}, {0, 0});
  CHECK(ds.n_event_types() == 1);
}
