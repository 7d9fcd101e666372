#include "tenas/search/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tenas/common.hpp"

namespace tenas::search {

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::SumRank: return "sum-rank";
    case Strategy::MinRank: return "min-rank";
    case Strategy::MaxRank: return "max-rank";
    case Strategy::RawSum: return "raw-sum";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::SumRank, Strategy::MinRank, Strategy::MaxRank, Strategy::RawSum})
    if (strategy_name(s) == name) return s;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected sum-rank, min-rank, max-rank, raw-sum)");
}

double kappa_difference(double kappa_a, double kappa_b) noexcept {
  if (std::isinf(kappa_a) && std::isinf(kappa_b) && (kappa_a > 0) == (kappa_b > 0)) return 0.0;
  return kappa_a - kappa_b;
}

ImportanceTable build_importance(std::vector<DeltaRow> deltas, Strategy strategy) {
  if (deltas.empty()) throw InvalidArgument("importance table needs at least one row");
  std::sort(deltas.begin(), deltas.end(), [](const DeltaRow& a, const DeltaRow& b) {
    return a.edge != b.edge ? a.edge < b.edge : a.op < b.op;
  });
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (deltas[i].edge == deltas[i - 1].edge && deltas[i].op == deltas[i - 1].op) {
      throw InvalidArgument("duplicate (edge, op) row in importance table");
    }
  }
  for (const auto& d : deltas) {
    if (std::isnan(d.delta_kappa) || std::isnan(d.delta_r)) {
      throw InvalidArgument("importance table row has a NaN delta");
    }
  }

  const std::size_t n = deltas.size();
  std::vector<std::size_t> order(n);

  // Rows are already in (edge, op) order, so a stable sort breaks ties by it.
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return deltas[a].delta_kappa > deltas[b].delta_kappa;
  });
  std::vector<std::size_t> s_kappa(n);
  for (std::size_t pos = 0; pos < n; ++pos) s_kappa[order[pos]] = pos;

  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return deltas[a].delta_r < deltas[b].delta_r;
  });
  std::vector<std::size_t> s_r(n);
  for (std::size_t pos = 0; pos < n; ++pos) s_r[order[pos]] = pos;

  ImportanceTable table;
  table.strategy = strategy;
  table.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = deltas[i];
    ImportanceRow row{d.edge, d.op, d.delta_kappa, d.delta_r, s_kappa[i], s_r[i], 0.0};
    const auto sk = static_cast<double>(row.s_kappa), sr = static_cast<double>(row.s_r);
    switch (strategy) {
      case Strategy::SumRank: row.s = sk + sr; break;
      case Strategy::MinRank: row.s = std::min(sk, sr); break;
      case Strategy::MaxRank: row.s = std::max(sk, sr); break;
      case Strategy::RawSum: {
        const double sum = d.delta_kappa + d.delta_r;
        row.s = std::isnan(sum) ? 0.0 : sum;
        break;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

std::map<std::size_t, std::size_t> ImportanceTable::argmin_per_edge() const {
  std::map<std::size_t, std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = best.try_emplace(rows[i].edge, i);
    if (!inserted && rows[i].s < rows[it->second].s) it->second = i;
  }
  return best;
}

}  // namespace tenas::search
