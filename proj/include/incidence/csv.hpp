#pragma once

#include <string>

#include "incidence/dataset.hpp"

namespace incidence {

// Reads a UTF-8, comma-separated file with a header row. Every column other
// than the duration/event columns is a numeric feature. Non-numeric cells,
// non-positive durations and out-of-range event labels raise a parse error
// naming the offending row.
SurvivalDataset load_csv(const std::string& path,
                         const std::string& duration_column = "duration",
                         const std::string& event_column = "event");

// Inverse of load_csv up to floating-point text precision (doubles are written
// with 17 significant digits, so a save/load round trip is exact).
void save_csv(const SurvivalDataset& dataset, const std::string& path,
              const std::string& duration_column = "duration",
              const std::string& event_column = "event");

}  // namespace incidence
