#pragma once

#include "vem/common.hpp"
#include "vem/time_grid.hpp"

namespace vem {

/// State/control values on a time grid. Column k holds the value at node k.
/// Node 0 of x is pinned to the problem's initial state for the whole
/// evolution (its variation rate is identically zero).
struct Trajectory {
  TimeGrid grid;
  Mat x;  // n x N
  Mat u;  // m x N

  int N() const { return grid.N; }
  double tf() const { return grid.tf; }
};

}  // namespace vem
