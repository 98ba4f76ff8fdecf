#include "incidence/step_curve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace incidence {

double StepCurve::at(double t) const {
  // first stored time strictly greater than t; the value lives one slot left
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return value_at_zero;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

double StepCurve::before(double t) const {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return value_at_zero;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

void write_csv(const StepCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "time,value\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", 0.0, curve.value_at_zero);
  out << buf;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", curve.times[i], curve.values[i]);
    out << buf;
  }
}

}  // namespace incidence
