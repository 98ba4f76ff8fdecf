#include "incidence/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace incidence {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t data_row,
                    const std::string& column) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
    throw std::runtime_error(path + ": row " + std::to_string(data_row) + ", column '" + column +
                             "': non-numeric cell '" + cell + "'");
  }
  return v;
}

}  // namespace

SurvivalDataset load_csv(const std::string& path, const std::string& duration_column,
                         const std::string& event_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  int duration_idx = -1;
  int event_idx = -1;
  std::vector<std::string> feature_names;
  std::vector<int> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == duration_column) {
      duration_idx = static_cast<int>(j);
    } else if (header[j] == event_column) {
      event_idx = static_cast<int>(j);
    } else {
      feature_names.push_back(header[j]);
      feature_cols.push_back(static_cast<int>(j));
    }
  }
  if (duration_idx < 0) throw std::runtime_error(path + ": missing column '" + duration_column + "'");
  if (event_idx < 0) throw std::runtime_error(path + ": missing column '" + event_column + "'");
  if (feature_cols.empty()) throw std::runtime_error(path + ": no feature columns");

  std::vector<double> features;
  std::vector<double> durations;
  std::vector<int> events;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++data_row;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": row " + std::to_string(data_row) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }
    const double duration =
        parse_number(cells[duration_idx], path, data_row, duration_column);
    if (!(duration > 0.0)) {
      throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                               ": duration must be strictly positive");
    }
    const double event_raw = parse_number(cells[event_idx], path, data_row, event_column);
    if (event_raw < 0.0 || event_raw != std::floor(event_raw)) {
      throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                               ": event label must be a non-negative integer");
    }
    durations.push_back(duration);
    events.push_back(static_cast<int>(event_raw));
    for (std::size_t c = 0; c < feature_cols.size(); ++c) {
      features.push_back(parse_number(cells[feature_cols[c]], path, data_row, feature_names[c]));
    }
  }
  if (data_row == 0) throw std::runtime_error(path + ": no data rows");

  return SurvivalDataset(std::move(features), feature_cols.size(), std::move(durations),
                         std::move(events), 0, std::move(feature_names));
}

void save_csv(const SurvivalDataset& dataset, const std::string& path,
              const std::string& duration_column, const std::string& event_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  for (std::size_t j = 0; j < dataset.n_features(); ++j) {
    out << dataset.feature_names()[j] << ',';
  }
  out << duration_column << ',' << event_column << '\n';

  char buf[64];
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    const auto row = dataset.row(i);
    for (double v : row) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", dataset.duration(i));
    out << buf << ',' << dataset.event(i) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace incidence
