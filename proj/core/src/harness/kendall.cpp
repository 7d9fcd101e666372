#include "tenas/harness/kendall.hpp"

#include <cmath>

#include "tenas/common.hpp"

namespace tenas::harness {

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("kendall_tau: length mismatch");
  if (xs.size() < 2) throw InvalidArgument("kendall_tau: need at least two observations");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      ++pairs;
      const int dx = (xs[i] < xs[j]) - (xs[j] < xs[i]);
      const int dy = (ys[i] < ys[j]) - (ys[j] < ys[i]);
      if (dx == 0) ++ties_x;
      if (dy == 0) ++ties_y;
      if (dx * dy > 0) ++concordant;
      if (dx * dy < 0) ++discordant;
    }
  }
  const double norm = std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
  if (norm == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / norm;
}

}  // namespace tenas::harness
