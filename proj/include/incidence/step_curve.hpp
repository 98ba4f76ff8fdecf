#pragma once

#include <string>
#include <vector>

namespace incidence {

// Right-continuous piecewise-constant function of time: value(t) is the value
// stored at the largest time <= t, and value_at_zero before the first stored
// time. Survival-type curves are non-increasing, incidence-type curves
// non-decreasing; estimators guarantee the direction.
struct StepCurve {
  std::vector<double> times;   // strictly increasing, positive
  std::vector<double> values;  // same length as times
  double value_at_zero = 1.0;

  double at(double t) const;      // right-continuous evaluation
  double before(double t) const;  // left limit: largest stored time < t
};

// time,value pairs for plotting; the first row is (0, value_at_zero).
void write_csv(const StepCurve& curve, const std::string& path);

}  // namespace incidence
