#pragma once

#include <span>
#include <vector>

#include "incidence/dataset.hpp"
#include "incidence/step_curve.hpp"

namespace incidence {

// Product-limit survival estimate. Ties at equal times are handled with events
// processed before censorings.
StepCurve kaplan_meier(std::span<const double> durations, std::span<const bool> observed);
StepCurve kaplan_meier(std::span<const double> durations, const std::vector<bool>& observed);

// Kaplan-Meier estimate of P(C > t): censoring (event == 0) plays the role of
// the event and all real events are censored for this sub-problem.
StepCurve censoring_km(const SurvivalDataset& dataset);

struct CompetingCurves {
  std::vector<StepCurve> cif;  // one non-decreasing curve per event type
  StepCurve survival;          // 1 - sum of CIFs at every stored time
};

// Aalen-Johansen estimator: CIF_k(t) = sum over event times u <= t of
// S(u-) * d_k(u) / n(u), with S the all-events Kaplan-Meier product.
CompetingCurves aalen_johansen(const SurvivalDataset& dataset);

// 1 / max(G(t-), clip_floor). The left limit keeps a row censored exactly at t
// from being down-weighted by its own censoring atom.
double ipcw_weight(const StepCurve& g, double t, double clip_floor = 1e-12);

}  // namespace incidence
