#include "tenas/search/trajectory.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"

namespace tenas::search {

std::string format_real(double value) {
  if (std::isinf(value) && value > 0) return "divergent";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_trajectory_jsonl(std::ostream& out, const std::vector<TrajectoryRecord>& records,
                            const std::string& manifest) {
  for (const auto& r : records) {
    nlohmann::ordered_json line;
    line["round"] = r.round;
    line["supernet"] = r.supernet;
    if (std::isinf(r.kappa_mean)) {
      line["kappa_mean"] = "divergent";
    } else {
      line["kappa_mean"] = r.kappa_mean;
    }
    line["r_hat"] = r.r_hat;
    auto pruned = nlohmann::ordered_json::array();
    for (const auto& p : r.pruned) pruned.push_back({{"edge", p.edge}, {"op", p.op}});
    line["pruned"] = std::move(pruned);
    line["evaluations"] = r.evaluations;
    line["slots"] = r.slots;
    line["manifest"] = manifest;
    out << line.dump() << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << "round,kappa_mean,r_hat\n";
  for (const auto& r : records) {
    out << r.round << ',' << format_real(r.kappa_mean) << ',' << format_real(r.r_hat) << '\n';
  }
}

}  // namespace tenas::search
