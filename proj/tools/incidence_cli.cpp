// Command-line surface: synthetic data generation, training, prediction,
// censoring-aware evaluation and a benchmark sweep against the
// Aalen-Johansen baseline. Every run writes a manifest next to its outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "incidence/csv.hpp"
#include "incidence/marginal.hpp"
#include "incidence/metrics.hpp"
#include "incidence/model.hpp"
#include "incidence/serialize.hpp"
#include "incidence/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace incidence;

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_manifest(const fs::path& out_dir, const std::string& command, std::uint64_t seed,
                    const json& flags, const std::vector<std::string>& outputs,
                    std::optional<double> fit_seconds = std::nullopt) {
  json j;
  j["command"] = command;
  j["library"] = kLibraryVersion;
  j["seed"] = seed;
  j["flags"] = flags;
  json paths = json::array();
  for (const std::string& name : outputs) paths.push_back((out_dir / name).string());
  j["outputs"] = paths;
  if (fit_seconds.has_value()) j["fit_seconds"] = *fit_seconds;
  write_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  SynthConfig config;
  std::string out;
};

void run_generate(const GenerateArgs& args) {
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const SynthResult result = generate(args.config);
  save_csv(result.data, (out_dir / "data.csv").string());
  write_text(out_dir / "oracle.json", oracle_to_json(result.oracle, result.realized_censoring));

  json flags;
  flags["n"] = args.config.n_samples;
  flags["events"] = args.config.n_events;
  flags["features"] = args.config.n_features;
  flags["censoring"] = args.config.target_censoring_rate;
  flags["censoring_features"] = args.config.censoring_dependence;
  flags["realized_censoring"] = result.realized_censoring;
  write_manifest(out_dir, "generate", args.config.seed, flags, {"data.csv", "oracle.json"});
  std::printf("generated %zu rows (%d events, censoring %.3f) -> %s\n", result.data.n_rows(),
              result.data.n_event_types(), result.realized_censoring, out_dir.c_str());
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string duration_column = "duration";
  std::string event_column = "event";
  TrainConfig config;
  bool km_weights = false;
  std::string out;
};

void run_fit(const FitArgs& args) {
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const SurvivalDataset dataset = load_csv(args.data, args.duration_column, args.event_column);

  FitOptions options;
  if (args.km_weights) options.censoring_source = CensoringSource::marginal_km;

  const auto start = std::chrono::steady_clock::now();
  const IncidenceModel model = fit(dataset, args.config, options);
  const double seconds = elapsed_seconds(start);

  save_model(model, (out_dir / "model.json").string());
  json flags;
  flags["data"] = args.data;
  flags["learning_rate"] = args.config.learning_rate;
  flags["n_iter"] = args.config.n_iter;
  flags["max_depth"] = args.config.max_depth;
  flags["n_times"] = args.config.n_time_samples;
  flags["censoring_warmup"] = args.config.n_censoring_warmup;
  flags["clip_floor"] = args.config.clip_floor;
  flags["km_weights"] = args.km_weights;
  write_manifest(out_dir, "fit", args.config.seed, flags, {"model.json"}, seconds);
  std::printf("fit %zu rows in %.2f s -> %s\n", dataset.n_rows(), seconds,
              (out_dir / "model.json").c_str());
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  std::string duration_column = "duration";
  std::string event_column = "event";
  std::vector<double> horizons;
  std::string out;
};

void run_predict(const PredictArgs& args) {
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const IncidenceModel model = load_model(args.model);
  const SurvivalDataset dataset = load_csv(args.data, args.duration_column, args.event_column);
  const std::vector<double> probs = predict_prob_grid(model, dataset, args.horizons);

  const int n_classes = model.n_event_types + 1;
  std::string text = "row,horizon,survival";
  for (int k = 1; k < n_classes; ++k) text += ",cif_" + std::to_string(k);
  text += "\n";
  char buf[64];
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    for (std::size_t j = 0; j < args.horizons.size(); ++j) {
      text += std::to_string(i);
      std::snprintf(buf, sizeof(buf), ",%.17g", args.horizons[j]);
      text += buf;
      for (int c = 0; c < n_classes; ++c) {
        std::snprintf(buf, sizeof(buf), ",%.17g",
                      probs[(i * args.horizons.size() + j) * n_classes + c]);
        text += buf;
      }
      text += "\n";
    }
  }
  write_text(out_dir / "predictions.csv", text);

  json flags;
  flags["model"] = args.model;
  flags["data"] = args.data;
  flags["horizons"] = args.horizons;
  write_manifest(out_dir, "predict", model.config.seed, flags, {"predictions.csv"});
  std::printf("wrote %zu prediction rows -> %s\n", dataset.n_rows() * args.horizons.size(),
              (out_dir / "predictions.csv").c_str());
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string predictions;
  std::string data;
  std::string duration_column = "duration";
  std::string event_column = "event";
  std::size_t grid_points = 100;
  std::vector<double> quantiles = {0.25, 0.5, 0.75};
  int nodes = 32;
  std::string oracle;
  std::string out;
};

struct PredictionFile {
  std::vector<double> horizons;               // sorted unique
  std::vector<double> probs_by_horizon;       // (horizon, row, class) blocks
  int n_classes = 0;
};

PredictionFile read_predictions(const std::string& path, std::size_t n_rows, int n_events) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

  struct Record {
    std::size_t row;
    double horizon;
    std::vector<double> probs;
  };
  std::vector<Record> records;
  const std::size_t n_classes = static_cast<std::size_t>(n_events) + 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": non-numeric cell '" + cell + "'");
      }
    }
    if (cells.size() != n_classes + 2) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected row, horizon and " + std::to_string(n_classes) +
                               " probabilities");
    }
    Record r;
    r.row = static_cast<std::size_t>(cells[0]);
    r.horizon = cells[1];
    r.probs.assign(cells.begin() + 2, cells.end());
    records.push_back(std::move(r));
  }

  PredictionFile file;
  file.n_classes = static_cast<int>(n_classes);
  std::map<double, std::size_t> horizon_index;
  for (const Record& r : records) horizon_index.emplace(r.horizon, 0);
  std::size_t next = 0;
  for (auto& [h, idx] : horizon_index) idx = next++;
  file.horizons.resize(horizon_index.size());
  for (const auto& [h, idx] : horizon_index) file.horizons[idx] = h;

  file.probs_by_horizon.assign(file.horizons.size() * n_rows * n_classes, -1.0);
  for (const Record& r : records) {
    if (r.row >= n_rows) throw std::runtime_error("predictions file: row index out of range");
    const std::size_t h = horizon_index.at(r.horizon);
    double* slot = &file.probs_by_horizon[(h * n_rows + r.row) * n_classes];
    for (std::size_t c = 0; c < n_classes; ++c) slot[c] = r.probs[c];
  }
  for (double v : file.probs_by_horizon) {
    if (v < 0.0) throw std::runtime_error("predictions file: missing (row, horizon) entries");
  }
  return file;
}

void run_evaluate(const EvaluateArgs& args) {
  if (args.model.empty() == args.predictions.empty()) {
    throw CLI::ValidationError("evaluate", "exactly one of --model / --predictions is required");
  }
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  const SurvivalDataset dataset = load_csv(args.data, args.duration_column, args.event_column);

  std::optional<SynthOracle> oracle;
  std::unique_ptr<CensoringModel> g_hat;
  if (!args.oracle.empty()) {
    oracle.emplace(oracle_from_json(read_text(args.oracle)));
    g_hat = std::make_unique<OracleCensoring>(*oracle);
  } else {
    g_hat = std::make_unique<CurveCensoring>(censoring_km(dataset));
  }

  const TimeGrid quantile_horizons = quantile_grid(dataset, args.quantiles);
  MetricReport report;
  report.horizons = quantile_horizons.horizons;
  report.s_cen_nodes = args.nodes;
  const int k_types = dataset.n_event_types();

  if (!args.model.empty()) {
    const IncidenceModel model = load_model(args.model);
    if (model.n_event_types != k_types) {
      throw std::runtime_error("evaluate: model and dataset disagree on the event count");
    }
    const TimeGrid grid = default_ibs_grid(dataset, args.grid_points);
    const CifGrid preds = model_cif_grid(model, dataset, grid);
    const IbsReport ibs = integrated_brier(preds, dataset, grid, *g_hat);
    report.per_event_ibs = ibs.per_event;
    report.average_ibs = ibs.average;

    const std::vector<double> probs =
        predict_prob_grid(model, dataset, quantile_horizons.horizons);
    const std::size_t m = quantile_horizons.horizons.size();
    report.c_index.assign(k_types, {});
    for (std::size_t h = 0; h < m; ++h) {
      std::vector<double> at_h(dataset.n_rows() * (k_types + 1));
      for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
        for (int c = 0; c <= k_types; ++c) {
          at_h[i * (k_types + 1) + c] = probs[(i * m + h) * (k_types + 1) + c];
        }
      }
      report.accuracy.push_back(accuracy_in_time(at_h, dataset, quantile_horizons.horizons[h]));
      for (int k = 0; k < k_types; ++k) {
        std::vector<double> risk(dataset.n_rows());
        for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
          risk[i] = at_h[i * (k_types + 1) + k + 1];
        }
        report.c_index[k].push_back(
            c_index_at(risk, dataset, quantile_horizons.horizons[h], k + 1));
      }
      if (h == m / 2) {
        report.logloss_horizon = quantile_horizons.horizons[h];
        report.logloss =
            weighted_logloss(at_h, dataset, quantile_horizons.horizons[h], *g_hat);
      }
    }

    // survival on the equally spaced node grid for the piecewise log score
    const double t_max = dataset.max_duration();
    std::vector<double> node_horizons(args.nodes + 1);
    for (int b = 0; b <= args.nodes; ++b) {
      node_horizons[b] = t_max * static_cast<double>(b) / static_cast<double>(args.nodes);
    }
    const std::vector<double> node_probs = predict_prob_grid(model, dataset, node_horizons);
    std::vector<double> survival_nodes(dataset.n_rows() * (args.nodes + 1));
    for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
      for (int b = 0; b <= args.nodes; ++b) {
        survival_nodes[i * (args.nodes + 1) + b] =
            node_probs[(i * node_horizons.size() + b) * (k_types + 1)];
      }
    }
    report.s_cen_log_simple = s_cen_log_simple(survival_nodes, dataset, args.nodes, t_max);
    report.cif_monotonicity = cif_monotonicity_fraction(model, dataset, 2000, 0);
    if (oracle.has_value()) report.oracle_ibs = oracle_ibs(*oracle, dataset, grid);
  } else {
    const PredictionFile file = read_predictions(args.predictions, dataset.n_rows(), k_types);
    if (file.horizons.size() < 2) {
      throw std::runtime_error("evaluate: prediction file needs at least two horizons");
    }
    TimeGrid grid;
    grid.horizons = file.horizons;
    grid.t_max = dataset.max_duration();
    CifGrid preds = CifGrid::zeros(dataset.n_rows(), file.horizons.size(), k_types);
    for (std::size_t h = 0; h < file.horizons.size(); ++h) {
      for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
        for (int k = 0; k < k_types; ++k) {
          preds.at(i, h, k) =
              file.probs_by_horizon[(h * dataset.n_rows() + i) * file.n_classes + k + 1];
        }
      }
    }
    const IbsReport ibs = integrated_brier(preds, dataset, grid, *g_hat);
    report.per_event_ibs = ibs.per_event;
    report.average_ibs = ibs.average;

    // accuracy / concordance / log-loss at the nearest positive horizon; a
    // horizon with nothing to compare reports NaN rather than failing the run
    const double quiet_nan = std::numeric_limits<double>::quiet_NaN();
    report.c_index.assign(k_types, {});
    report.horizons.clear();
    for (double target : quantile_horizons.horizons) {
      std::size_t h = file.horizons.size();
      for (std::size_t j = 0; j < file.horizons.size(); ++j) {
        if (file.horizons[j] <= 0.0) continue;
        if (h == file.horizons.size() ||
            std::abs(file.horizons[j] - target) < std::abs(file.horizons[h] - target)) {
          h = j;
        }
      }
      if (h == file.horizons.size()) {
        throw std::runtime_error("evaluate: prediction file has no positive horizons");
      }
      const double zeta = file.horizons[h];
      report.horizons.push_back(zeta);
      std::vector<double> at_h(dataset.n_rows() * file.n_classes);
      for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
        for (int c = 0; c < file.n_classes; ++c) {
          at_h[i * file.n_classes + c] =
              file.probs_by_horizon[(h * dataset.n_rows() + i) * file.n_classes + c];
        }
      }
      try {
        report.accuracy.push_back(accuracy_in_time(at_h, dataset, zeta));
      } catch (const std::runtime_error&) {
        report.accuracy.push_back(quiet_nan);
      }
      for (int k = 0; k < k_types; ++k) {
        std::vector<double> risk(dataset.n_rows());
        for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
          risk[i] = at_h[i * file.n_classes + k + 1];
        }
        try {
          report.c_index[k].push_back(c_index_at(risk, dataset, zeta, k + 1));
        } catch (const std::runtime_error&) {
          report.c_index[k].push_back(quiet_nan);
        }
      }
      if (report.horizons.size() == (quantile_horizons.horizons.size() + 2) / 2) {
        report.logloss_horizon = zeta;
        report.logloss = weighted_logloss(at_h, dataset, zeta, *g_hat);
      }
    }
    if (oracle.has_value()) report.oracle_ibs = oracle_ibs(*oracle, dataset, grid);
  }

  write_text(out_dir / "report.json", report_to_json(report));
  write_text(out_dir / "report.csv", report_to_csv(report));
  json flags;
  flags["data"] = args.data;
  flags["model"] = args.model;
  flags["predictions"] = args.predictions;
  flags["grid_points"] = args.grid_points;
  flags["quantiles"] = args.quantiles;
  flags["nodes"] = args.nodes;
  flags["oracle"] = args.oracle;
  write_manifest(out_dir, "evaluate", 0, flags, {"report.json", "report.csv"});
  std::printf("average IBS %.5f -> %s\n", report.average_ibs, (out_dir / "report.json").c_str());
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::vector<std::size_t> n_list = {1000, 5000, 20000};
  std::vector<double> censoring_list = {0.5};
  int events = 3;
  int features = 10;
  int censoring_features = 6;
  int seeds = 3;
  std::uint64_t base_seed = 0;
  std::size_t test_n = 2000;
  TrainConfig train;
  std::size_t grid_points = 100;
  std::string out;
};

void run_benchmark(const BenchmarkArgs& args) {
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  std::string csv = "model,n,censoring,d,ibs,fit_seconds\n";
  char buf[192];
  std::size_t cell = 0;
  for (std::size_t n : args.n_list) {
    for (double censoring : args.censoring_list) {
      for (int s = 0; s < args.seeds; ++s, ++cell) {
        SynthConfig config;
        config.n_samples = n + args.test_n;
        config.n_events = args.events;
        config.n_features = args.features;
        config.censoring_dependence = args.censoring_features;
        config.target_censoring_rate = censoring;
        config.seed = args.base_seed + 7919 * cell + s;
        const SynthResult synth = generate(config);

        std::vector<std::size_t> train_idx(n), test_idx(args.test_n);
        for (std::size_t i = 0; i < n; ++i) train_idx[i] = i;
        for (std::size_t i = 0; i < args.test_n; ++i) test_idx[i] = n + i;
        const SurvivalDataset train_set = synth.data.take_rows(train_idx);
        const SurvivalDataset test_set = synth.data.take_rows(test_idx);

        TrainConfig train = args.train;
        train.seed = config.seed;
        const auto start = std::chrono::steady_clock::now();
        const IncidenceModel model = fit(train_set, train);
        const double fit_seconds = elapsed_seconds(start);

        const TimeGrid grid = default_ibs_grid(test_set, args.grid_points);
        const OracleCensoring g(synth.oracle);
        const double model_ibs =
            integrated_brier(model_cif_grid(model, test_set, grid), test_set, grid, g).average;

        const auto aj_start = std::chrono::steady_clock::now();
        const CompetingCurves aj = aalen_johansen(train_set);
        const double aj_seconds = elapsed_seconds(aj_start);
        CifGrid aj_preds = CifGrid::zeros(test_set.n_rows(), grid.horizons.size(), args.events);
        for (std::size_t j = 0; j < grid.horizons.size(); ++j) {
          for (int k = 0; k < args.events; ++k) {
            const double v = aj.cif[k].at(grid.horizons[j]);
            for (std::size_t i = 0; i < test_set.n_rows(); ++i) aj_preds.at(i, j, k) = v;
          }
        }
        const double aj_ibs = integrated_brier(aj_preds, test_set, grid, g).average;
        const double oracle = oracle_ibs(synth.oracle, test_set, grid);

        std::snprintf(buf, sizeof(buf), "incidence_boost,%zu,%g,%d,%.6f,%.3f\n", n, censoring,
                      args.features, model_ibs, fit_seconds);
        csv += buf;
        std::snprintf(buf, sizeof(buf), "aalen_johansen,%zu,%g,%d,%.6f,%.3f\n", n, censoring,
                      args.features, aj_ibs, aj_seconds);
        csv += buf;
        std::snprintf(buf, sizeof(buf), "oracle,%zu,%g,%d,%.6f,0.000\n", n, censoring,
                      args.features, oracle);
        csv += buf;
        std::printf("n=%zu censoring=%.2f seed=%llu: model %.4f, aalen-johansen %.4f, "
                    "oracle %.4f (fit %.1f s)\n",
                    n, censoring, static_cast<unsigned long long>(config.seed), model_ibs,
                    aj_ibs, oracle, fit_seconds);
      }
    }
  }
  write_text(out_dir / "benchmark.csv", csv);

  json flags;
  flags["n_list"] = args.n_list;
  flags["censoring_list"] = args.censoring_list;
  flags["events"] = args.events;
  flags["features"] = args.features;
  flags["censoring_features"] = args.censoring_features;
  flags["seeds"] = args.seeds;
  flags["test_n"] = args.test_n;
  flags["n_iter"] = args.train.n_iter;
  flags["learning_rate"] = args.train.learning_rate;
  flags["max_depth"] = args.train.max_depth;
  flags["n_times"] = args.train.n_time_samples;
  write_manifest(out_dir, "benchmark", args.base_seed, flags, {"benchmark.csv"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"competing-risks incidence modeling"};
  app.require_subcommand(1);

  const auto unit_interval = CLI::Range(1e-12, 1.0);  // excludes zero

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset with its oracle");
  gen->add_option("--n", gen_args.config.n_samples, "number of rows")->required();
  gen->add_option("--events", gen_args.config.n_events, "competing event count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--features", gen_args.config.n_features, "feature count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--censoring", gen_args.config.target_censoring_rate,
                  "target censoring fraction in [0, 1)")
      ->check(CLI::Range(0.0, 0.999));
  gen->add_option("--censoring-features", gen_args.config.censoring_dependence,
                  "leading features driving censoring");
  gen->add_option("--seed", gen_args.config.seed, "generator seed");
  gen->add_option("--out", gen_args.out, "output directory")->required();

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "train a model on a dataset CSV");
  fit_cmd->add_option("--data", fit_args.data, "dataset CSV")->required();
  fit_cmd->add_option("--duration-column", fit_args.duration_column, "duration column name");
  fit_cmd->add_option("--event-column", fit_args.event_column, "event column name");
  fit_cmd->add_option("--learning-rate", fit_args.config.learning_rate, "boosting step size")
      ->check(unit_interval);
  fit_cmd->add_option("--n-iter", fit_args.config.n_iter, "boosting iterations")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-depth", fit_args.config.max_depth, "tree depth")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--n-times", fit_args.config.n_time_samples, "horizon draws per row")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--censoring-warmup", fit_args.config.n_censoring_warmup,
                      "warm-up rounds of the censoring model")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--clip-floor", fit_args.config.clip_floor, "IPCW denominator floor")
      ->check(CLI::Range(1e-300, 0.999));
  fit_cmd->add_option("--seed", fit_args.config.seed, "training seed");
  fit_cmd->add_flag("--km-weights", fit_args.km_weights,
                    "weight with the marginal censoring Kaplan-Meier instead of the ensemble");
  fit_cmd->add_option("--out", fit_args.out, "output directory")->required();

  PredictArgs predict_args;
  CLI::App* predict_cmd = app.add_subcommand("predict", "incidence probabilities at horizons");
  predict_cmd->add_option("--model", predict_args.model, "model JSON")->required();
  predict_cmd->add_option("--data", predict_args.data, "dataset CSV")->required();
  predict_cmd->add_option("--duration-column", predict_args.duration_column, "duration column");
  predict_cmd->add_option("--event-column", predict_args.event_column, "event column");
  predict_cmd->add_option("--horizons", predict_args.horizons, "comma-separated horizons")
      ->required()
      ->delimiter(',');
  predict_cmd->add_option("--out", predict_args.out, "output directory")->required();

  EvaluateArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "censoring-aware metric report");
  eval_cmd->add_option("--model", eval_args.model, "model JSON");
  eval_cmd->add_option("--predictions", eval_args.predictions, "predictions CSV");
  eval_cmd->add_option("--data", eval_args.data, "dataset CSV")->required();
  eval_cmd->add_option("--duration-column", eval_args.duration_column, "duration column");
  eval_cmd->add_option("--event-column", eval_args.event_column, "event column");
  eval_cmd->add_option("--grid-points", eval_args.grid_points, "IBS grid resolution")
      ->check(CLI::Range(2, 100000));
  eval_cmd->add_option("--quantiles", eval_args.quantiles,
                       "event-time quantiles for accuracy and concordance")
      ->delimiter(',');
  eval_cmd->add_option("--nodes", eval_args.nodes, "equal intervals for the piecewise log score")
      ->check(CLI::Range(2, 100000));
  eval_cmd->add_option("--oracle", eval_args.oracle, "oracle side-car JSON for oracle weights");
  eval_cmd->add_option("--out", eval_args.out, "output directory")->required();

  BenchmarkArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "sweep model vs Aalen-Johansen vs oracle");
  bench_cmd->add_option("--n-list", bench_args.n_list, "training sizes")->delimiter(',');
  bench_cmd->add_option("--censoring-list", bench_args.censoring_list, "censoring rates")
      ->delimiter(',');
  bench_cmd->add_option("--events", bench_args.events, "competing event count")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--features", bench_args.features, "feature count")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--censoring-features", bench_args.censoring_features,
                        "leading features driving censoring");
  bench_cmd->add_option("--seeds", bench_args.seeds, "seeds per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_args.base_seed, "base seed");
  bench_cmd->add_option("--test-n", bench_args.test_n, "held-out rows per cell");
  bench_cmd->add_option("--learning-rate", bench_args.train.learning_rate, "boosting step size")
      ->check(unit_interval);
  bench_cmd->add_option("--n-iter", bench_args.train.n_iter, "boosting iterations")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-depth", bench_args.train.max_depth, "tree depth")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--n-times", bench_args.train.n_time_samples, "horizon draws per row")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--censoring-warmup", bench_args.train.n_censoring_warmup,
                        "censoring warm-up rounds")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--clip-floor", bench_args.train.clip_floor, "IPCW denominator floor")
      ->check(CLI::Range(1e-300, 0.999));
  bench_cmd->add_option("--grid-points", bench_args.grid_points, "IBS grid resolution")
      ->check(CLI::Range(2, 100000));
  bench_cmd->add_option("--out", bench_args.out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*gen) run_generate(gen_args);
    if (*fit_cmd) run_fit(fit_args);
    if (*predict_cmd) run_predict(predict_args);
    if (*eval_cmd) run_evaluate(eval_args);
    if (*bench_cmd) run_benchmark(bench_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // runtime failure
  }
  return 0;
}
