#pragma once

#include <cmath>

#include "core/converter_model.hpp"
#include "core/tables.hpp"

namespace cmcert::test {

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Reference buck with explicit off-time bounds.
inline ConverterParams buck_with_bounds(double load, double t_min, double t_max) {
  ConverterParams p = reference_buck(load, true);
  p.t_var_min = t_min;
  p.t_var_max = t_max;
  return p;
}

}  // namespace cmcert::test
