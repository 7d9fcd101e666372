#pragma once

#include <span>

namespace tenas::harness {

/// Kendall's tau-b: (concordant − discordant) / sqrt((n0 − t_x)(n0 − t_y)),
/// which reduces to tau-a when neither list has ties. Returns 0 when either
/// list is constant. Throws InvalidArgument on length mismatch or n < 2.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

}  // namespace tenas::harness
