#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace tenas::harness {

/// The line w·x + b = 0 in the plane.
struct Hyperplane2d {
  std::array<double, 2> w{};
  double b = 0.0;
};

/// Number of nonempty cells of the line arrangement, computed incrementally:
/// each new distinct line adds one region per segment it is cut into.
/// Lines with w = 0 cut nothing; coincident lines count once.
/// Throws InvalidArgument for more than 20 lines.
std::size_t exact_regions_2d(std::span<const Hyperplane2d> hyperplanes);

}  // namespace tenas::harness
