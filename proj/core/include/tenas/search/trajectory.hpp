#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tenas/search/pruning.hpp"

namespace tenas::search {

/// Formats a real for output files: shortest round-trip decimal, or
/// "divergent" for +inf.
std::string format_real(double value);

/// One JSON object per line. Wall times are left out so that identical runs
/// produce identical files; `manifest` names the run manifest in each line.
void write_trajectory_jsonl(std::ostream& out, const std::vector<TrajectoryRecord>& records,
                            const std::string& manifest);

/// Header "round,kappa_mean,r_hat" then one row per record.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace tenas::search
