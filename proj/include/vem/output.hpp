#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vem/verify.hpp"

namespace vem {

/// (x, u) capture at one variation time, for evolution plots.
struct Snapshot {
  double tau = 0.0;
  Mat x;
  Mat u;
  Vec times;
};

/// Writes trajectory.csv, history.csv, summary.json and snapshots/*.csv under
/// out_dir. Floats are printed with 17 significant digits and '.' decimals.
void emit_outputs(const OcpProblem& p, const SolverConfig& cfg, const SolveResult& result,
                  const Mat& lambda, const OptimalityResiduals& residuals,
                  const std::vector<Snapshot>& snapshots, const std::filesystem::path& out_dir);

/// Logarithmically spaced snapshot targets in (0, tau_end], plus tau = 0.
std::vector<double> snapshot_schedule(double tau_end, int count);

}  // namespace vem
