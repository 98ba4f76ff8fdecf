#pragma once

#include <string>

#include "incidence/gbdt.hpp"
#include "incidence/model.hpp"

namespace incidence {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

std::string ensemble_to_json(const BoostedEnsemble& ensemble);
BoostedEnsemble ensemble_from_json(const std::string& text);

// Versioned document embedding both ensembles, t_max, K and the config echo.
// Loading rejects documents with a newer format version.
std::string model_to_json(const IncidenceModel& model);
IncidenceModel model_from_json(const std::string& text);

void save_model(const IncidenceModel& model, const std::string& path);
IncidenceModel load_model(const std::string& path);

}  // namespace incidence
