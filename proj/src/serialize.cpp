#include "incidence/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace incidence {

using nlohmann::json;

namespace {

json tree_to_json(const Tree& tree) {
  json t;
  std::vector<int> feature, left, right, threshold;
  std::vector<double> value;
  feature.reserve(tree.nodes.size());
  for (const TreeNode& node : tree.nodes) {
    feature.push_back(node.feature);
    threshold.push_back(node.threshold);
    left.push_back(node.left);
    right.push_back(node.right);
    value.push_back(node.value);
  }
  t["feature"] = feature;
  t["threshold"] = threshold;
  t["left"] = left;
  t["right"] = right;
  t["value"] = value;
  return t;
}

Tree tree_from_json(const json& t) {
  const auto& feature = t.at("feature");
  const auto& threshold = t.at("threshold");
  const auto& left = t.at("left");
  const auto& right = t.at("right");
  const auto& value = t.at("value");
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw std::runtime_error("model file: inconsistent tree arrays");
  }
  Tree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tree.nodes[i].feature = static_cast<std::int16_t>(feature[i].get<int>());
    tree.nodes[i].threshold = static_cast<std::uint8_t>(threshold[i].get<int>());
    tree.nodes[i].left = left[i].get<std::int32_t>();
    tree.nodes[i].right = right[i].get<std::int32_t>();
    tree.nodes[i].value = value[i].get<double>();
  }
  return tree;
}

json ensemble_to_json_obj(const BoostedEnsemble& ensemble) {
  json j;
  j["format"] = "incidence-ensemble";
  j["version"] = kModelFormatVersion;
  j["n_classes"] = ensemble.n_classes;
  j["learning_rate"] = ensemble.learning_rate;
  j["base_scores"] = ensemble.base_scores;
  j["bin_edges"] = ensemble.bins.edges();
  json rounds = json::array();
  for (const auto& round : ensemble.rounds) {
    json r = json::array();
    for (const Tree& tree : round) r.push_back(tree_to_json(tree));
    rounds.push_back(std::move(r));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

BoostedEnsemble ensemble_from_json_obj(const json& j) {
  if (j.contains("version") && j.at("version").get<int>() > kModelFormatVersion) {
    throw std::runtime_error("ensemble document: format version is newer than supported");
  }
  BoostedEnsemble ensemble;
  ensemble.n_classes = j.at("n_classes").get<int>();
  ensemble.learning_rate = j.at("learning_rate").get<double>();
  ensemble.base_scores = j.at("base_scores").get<std::vector<double>>();
  ensemble.bins = BinMapper(j.at("bin_edges").get<std::vector<std::vector<double>>>());
  if (static_cast<int>(ensemble.base_scores.size()) != ensemble.n_classes) {
    throw std::runtime_error("model file: base_scores size mismatch");
  }
  for (const auto& r : j.at("rounds")) {
    std::vector<Tree> round;
    round.reserve(r.size());
    for (const auto& t : r) round.push_back(tree_from_json(t));
    if (static_cast<int>(round.size()) != ensemble.n_classes) {
      throw std::runtime_error("model file: round does not hold one tree per class");
    }
    ensemble.rounds.push_back(std::move(round));
  }
  return ensemble;
}

json config_to_json(const TrainConfig& config) {
  json j;
  j["learning_rate"] = config.learning_rate;
  j["n_iter"] = config.n_iter;
  j["max_depth"] = config.max_depth;
  j["n_time_samples"] = config.n_time_samples;
  j["n_censoring_warmup"] = config.n_censoring_warmup;
  j["clip_floor"] = config.clip_floor;
  j["seed"] = config.seed;
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig config;
  config.learning_rate = j.at("learning_rate").get<double>();
  config.n_iter = j.at("n_iter").get<int>();
  config.max_depth = j.at("max_depth").get<int>();
  config.n_time_samples = j.at("n_time_samples").get<int>();
  config.n_censoring_warmup = j.at("n_censoring_warmup").get<int>();
  config.clip_floor = j.at("clip_floor").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

}  // namespace

std::string ensemble_to_json(const BoostedEnsemble& ensemble) {
  return ensemble_to_json_obj(ensemble).dump(2) + "\n";
}

BoostedEnsemble ensemble_from_json(const std::string& text) {
  return ensemble_from_json_obj(json::parse(text));
}

std::string model_to_json(const IncidenceModel& model) {
  json j;
  j["format"] = "incidence-model";
  j["version"] = kModelFormatVersion;
  j["library"] = kLibraryVersion;
  j["n_event_types"] = model.n_event_types;
  j["t_max"] = model.t_max;
  j["config"] = config_to_json(model.config);
  j["event_model"] = ensemble_to_json_obj(model.event_model);
  j["censoring_model"] = ensemble_to_json_obj(model.censoring_model);
  return j.dump(2) + "\n";
}

IncidenceModel model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.contains("format") || j.at("format").get<std::string>() != "incidence-model") {
    throw std::runtime_error("model file: unrecognized format");
  }
  const int version = j.at("version").get<int>();
  if (version > kModelFormatVersion) {
    throw std::runtime_error("model file: format version " + std::to_string(version) +
                             " is newer than supported version " +
                             std::to_string(kModelFormatVersion));
  }
  IncidenceModel model;
  model.n_event_types = j.at("n_event_types").get<int>();
  model.t_max = j.at("t_max").get<double>();
  model.config = config_from_json(j.at("config"));
  model.event_model = ensemble_from_json_obj(j.at("event_model"));
  model.censoring_model = ensemble_from_json_obj(j.at("censoring_model"));
  return model;
}

void save_model(const IncidenceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << model_to_json(model);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

IncidenceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace incidence
