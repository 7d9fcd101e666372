#include "tenas/harness/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tenas/common.hpp"

namespace tenas::harness {

namespace {

constexpr double kTolerance = 1e-9;

/// Unit normal with a fixed sign convention, so equal lines compare equal.
Hyperplane2d normalize(const Hyperplane2d& h) {
  const double norm = std::hypot(h.w[0], h.w[1]);
  Hyperplane2d out{{h.w[0] / norm, h.w[1] / norm}, h.b / norm};
  const bool flip = out.w[0] < -kTolerance || (std::abs(out.w[0]) <= kTolerance && out.w[1] < 0);
  if (flip) out = {{-out.w[0], -out.w[1]}, -out.b};
  return out;
}

bool same_line(const Hyperplane2d& a, const Hyperplane2d& b) {
  return std::abs(a.w[0] - b.w[0]) <= kTolerance && std::abs(a.w[1] - b.w[1]) <= kTolerance &&
         std::abs(a.b - b.b) <= kTolerance * std::max(1.0, std::abs(a.b));
}

}  // namespace

std::size_t exact_regions_2d(std::span<const Hyperplane2d> hyperplanes) {
  if (hyperplanes.size() > 20) throw InvalidArgument("exact_regions_2d handles at most 20 lines");
  std::vector<Hyperplane2d> lines;
  std::size_t regions = 1;
  for (const auto& raw : hyperplanes) {
    if (raw.w[0] == 0.0 && raw.w[1] == 0.0) continue;
    const auto line = normalize(raw);
    if (std::any_of(lines.begin(), lines.end(), [&](const auto& l) { return same_line(l, line); })) continue;

    // Intersections with earlier lines, as positions along this line's
    // direction (-w1, w0) from its foot point -b*w.
    std::vector<double> cuts;
    for (const auto& other : lines) {
      const double det = line.w[0] * other.w[1] - line.w[1] * other.w[0];
      if (std::abs(det) <= kTolerance) continue;  // parallel
      const double x = (-line.b * other.w[1] + other.b * line.w[1]) / det;
      const double y = (-other.b * line.w[0] + line.b * other.w[0]) / det;
      cuts.push_back(-line.w[1] * x + line.w[0] * y);
    }
    std::sort(cuts.begin(), cuts.end());
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (i == 0 || cuts[i] - cuts[i - 1] > kTolerance * std::max(1.0, std::abs(cuts[i]))) ++distinct;
    }
    regions += distinct + 1;
    lines.push_back(line);
  }
  return regions;
}

}  // namespace tenas::harness
