#pragma once

#include <map>
#include <optional>
#include <string>

#include "vem/init.hpp"

namespace vem {

/// Closed-form reference solution where one exists.
struct AnalyticOracle {
  std::function<Vec(double)> x;
  std::function<Vec(double)> u;
  std::function<Vec(double)> lambda;
  double tf = 0.0;
  std::vector<double> switch_times;
};

/// Reference values for problems whose optimum is only known numerically.
struct ReferenceValues {
  double tf = 0.0;
  double arc_x_begin = 0.0;  // active-arc span in the x coordinate
  double arc_x_end = 0.0;
};

struct BuiltinProblem {
  std::string name;
  OcpProblem ocp;
  SolverConfig cfg;
  std::optional<AnalyticOracle> oracle;
  std::optional<InitSpec> init;          // closed-form initializer
  std::optional<FssopOptions> fssop;     // feasible-solution search initializer
  std::optional<ReferenceValues> reference;
  SampleBox validation_box;

  /// Runs whichever initializer the problem ships.
  Trajectory build_initializer() const;
};

/// Time-optimal double integrator with the control box encoded as
/// u^2 - 1 <= 0, initialized through the minimum-energy search run.
BuiltinProblem example1();

/// Brachistochrone descent to x = 2 under the slope constraint
/// -0.5 x - y - 0.35 <= 0, initialized by a straight-line motion.
BuiltinProblem example2();

const std::map<std::string, BuiltinProblem (*)()>& builtin_problems();

}  // namespace vem
