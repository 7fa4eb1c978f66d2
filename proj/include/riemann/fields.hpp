#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace riemann {

// A real multi-component field over (t, x, y). Evaluators are pure and safe to
// call concurrently. `period` marks components that are only defined modulo a
// constant (the plasticity angle is mod pi): finite-difference stencils unwrap
// such components toward the stencil center before differencing.
struct FieldEvaluator {
  std::size_t q = 0;
  std::function<std::vector<double>(double t, double x, double y)> eval;
  std::vector<double> period;  // size q or empty; 0 = not periodic
  // Optional exclusion predicate (true = point excluded, e.g. near a pole).
  std::function<bool(double t, double x, double y)> mask;
  std::vector<std::string> names;  // optional component labels
};

}  // namespace riemann
