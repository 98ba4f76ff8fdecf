#pragma once

#include <span>

#include "incidence/step_curve.hpp"

namespace incidence {

// Censoring predictor used by IPCW weighting and the censoring-adjusted
// metrics. remaining_before returns P(C >= t | x) -- the left limit, so a row
// censored exactly at t keeps positive mass.
class CensoringModel {
 public:
  virtual ~CensoringModel() = default;
  virtual double remaining_before(std::span<const double> row, double t) const = 0;
};

// Marginal curve (typically the censoring Kaplan-Meier); covariates ignored.
class CurveCensoring final : public CensoringModel {
 public:
  explicit CurveCensoring(StepCurve curve) : curve_(std::move(curve)) {}
  double remaining_before(std::span<const double>, double t) const override {
    return curve_.before(t);
  }
  const StepCurve& curve() const { return curve_; }

 private:
  StepCurve curve_;
};

}  // namespace incidence
