#pragma once

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

namespace tenas::search {

/// How the two rank lists combine into one importance score s (lower s is
/// pruned first).
enum class Strategy {
  SumRank,  // s = s_kappa + s_r
  MinRank,  // s = min(s_kappa, s_r)
  MaxRank,  // s = max(s_kappa, s_r)
  RawSum,   // s = delta_kappa + delta_r
};

std::string_view strategy_name(Strategy s) noexcept;
/// Accepts "sum-rank", "min-rank", "max-rank", "raw-sum".
Strategy parse_strategy(std::string_view name);

/// kappa_a - kappa_b where either may be divergent (+inf):
/// inf - finite = +inf, finite - inf = -inf, inf - inf = 0.
double kappa_difference(double kappa_a, double kappa_b) noexcept;

struct DeltaRow {
  std::size_t edge = 0;
  std::size_t op = 0;  // operator index in the space
  double delta_kappa = 0.0;
  double delta_r = 0.0;
};

struct ImportanceRow {
  std::size_t edge = 0;
  std::size_t op = 0;
  double delta_kappa = 0.0;
  double delta_r = 0.0;
  std::size_t s_kappa = 0;  // position when sorted by delta_kappa descending
  std::size_t s_r = 0;      // position when sorted by delta_r ascending
  double s = 0.0;
};

/// Global importance ranking over every evaluated operator of a supernet.
/// Ties in a delta are broken by (edge, op) ascending.
struct ImportanceTable {
  std::vector<ImportanceRow> rows;  // sorted by (edge, op)
  Strategy strategy = Strategy::SumRank;

  /// For each edge, the index into `rows` of its minimal-s operator (ties:
  /// lowest operator index).
  [[nodiscard]] std::map<std::size_t, std::size_t> argmin_per_edge() const;
};

ImportanceTable build_importance(std::vector<DeltaRow> deltas, Strategy strategy);

}  // namespace tenas::search
