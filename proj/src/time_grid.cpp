#include "vem/time_grid.hpp"

#include <sstream>

namespace vem {

TimeGrid TimeGrid::uniform(int N, double t0, double tf) {
  Vec s(N > 0 ? N : 0);
  for (int i = 0; i < N; ++i) s[i] = static_cast<double>(i) / (N - 1);
  return with_fractions(std::move(s), t0, tf);
}

TimeGrid TimeGrid::with_fractions(Vec fractions, double t0, double tf) {
  const int N = static_cast<int>(fractions.size());
  if (N < 3) throw InvalidGridError("time grid needs at least 3 nodes");
  if (!(tf > t0)) throw InvalidGridError("time grid needs tf > t0");
  if (fractions[0] != 0.0 || fractions[N - 1] != 1.0) {
    throw InvalidGridError("grid fractions must start at 0 and end at 1");
  }
  for (int i = 0; i + 1 < N; ++i) {
    if (!(fractions[i + 1] > fractions[i])) {
      throw InvalidGridError("grid fractions must be strictly increasing");
    }
  }
  TimeGrid g;
  g.N = N;
  g.s = std::move(fractions);
  g.t0 = t0;
  g.tf = tf;
  return g;
}

Vec TimeGrid::trapezoid_weights(int from, int to) const {
  if (from < 0 || to >= N || from > to) {
    std::ostringstream os;
    os << "trapezoid range [" << from << ", " << to << "] out of grid bounds";
    throw InvalidGridError(os.str());
  }
  Vec w = Vec::Zero(N);
  for (int k = from; k < to; ++k) {
    const double half = 0.5 * dt(k);
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

double quad(const TimeGrid& grid, const Eigen::Ref<const Vec>& values, int from, int to) {
  if (from < 0 || to >= grid.N || from > to) {
    std::ostringstream os;
    os << "quad range [" << from << ", " << to << "] out of grid bounds";
    throw InvalidGridError(os.str());
  }
  if (values.size() != grid.N) {
    throw InvalidGridError("quad expects one value per grid node");
  }
  double acc = 0.0;
  for (int k = from; k < to; ++k) {
    acc += 0.5 * grid.dt(k) * (values[k] + values[k + 1]);
  }
  return acc;
}

double quad(const TimeGrid& grid, const Eigen::Ref<const Vec>& values) {
  return quad(grid, values, 0, grid.N - 1);
}

}  // namespace vem
