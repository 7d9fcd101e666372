#include "tenas/harness/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "tenas/common.hpp"
#include "tenas/harness/kendall.hpp"
#include "tenas/search/random_search.hpp"
#include "tenas/search/trajectory.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::harness {

namespace {

constexpr std::size_t kMinArchitectures = 10;

void score_rows(const std::shared_ptr<const space::SpaceConfig>& space, std::vector<CorrelationRow>& rows,
                const StudyConfig& config, const Dataset* data) {
  auto measure = config.measure;
  measure.jobs = 1;
  parallel_for(rows.size(), config.jobs, [&](std::size_t i) {
    auto& row = rows[i];
    const auto net = space::decode(row.arch_id, space);
    const auto s = metrics::score(space::realize(net), row.arch_id, measure);
    row.kappa = s.ntk.kappa_mean;
    row.r_hat = s.regions.r_hat;
    if (data != nullptr) {
      const auto trained = train_oracle(net, *data, config.train);
      row.accuracy = trained.test_accuracy;
      row.train_accuracy = trained.train_accuracy;
      row.diverged = trained.diverged;
    }
  });
}

CorrelationReport reduce(std::vector<CorrelationRow> rows) {
  if (rows.size() < kMinArchitectures) {
    throw InvalidArgument("a correlation study needs at least " + std::to_string(kMinArchitectures) +
                          " architectures, got " + std::to_string(rows.size()));
  }
  std::vector<double> kappa, r_hat, acc;
  for (const auto& r : rows) {
    kappa.push_back(r.kappa);
    r_hat.push_back(r.r_hat);
    acc.push_back(r.accuracy);
  }
  const auto combined = search::combined_rank(kappa, r_hat);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].combined_rank = combined[i];

  CorrelationReport report;
  report.tau_kappa = kendall_tau(kappa, acc);
  report.tau_r = kendall_tau(r_hat, acc);
  report.tau_combined = kendall_tau(combined, acc);
  report.n = rows.size();
  if (std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.train_accuracy.has_value(); })) {
    std::vector<double> train;
    for (const auto& r : rows) train.push_back(*r.train_accuracy);
    report.tau_train_test = kendall_tau(train, acc);
  }
  report.rows = std::move(rows);
  return report;
}

}  // namespace

std::vector<std::string> select_architectures(const space::SpaceConfig& space, std::size_t count,
                                              std::uint64_t seed) {
  const std::size_t total = space::architecture_count(space);
  auto archs = search::sample_architectures(space, count == 0 ? total : count, seed);
  std::sort(archs.begin(), archs.end());
  return archs;
}

CorrelationReport correlation_study(std::shared_ptr<const space::SpaceConfig> space,
                                    const std::vector<std::string>& archs, const Dataset& data,
                                    const StudyConfig& config) {
  std::vector<CorrelationRow> rows(archs.size());
  for (std::size_t i = 0; i < archs.size(); ++i) rows[i].arch_id = archs[i];
  if (rows.size() < kMinArchitectures) return reduce(std::move(rows));
  score_rows(space, rows, config, &data);
  return reduce(std::move(rows));
}

CorrelationReport correlation_study(std::shared_ptr<const space::SpaceConfig> space,
                                    const BenchmarkTable& table, const StudyConfig& config) {
  std::vector<CorrelationRow> rows;
  for (const auto& [arch, entry] : table.rows) {
    CorrelationRow row;
    row.arch_id = arch;
    row.accuracy = entry.test_accuracy;
    row.train_accuracy = entry.train_accuracy;
    rows.push_back(std::move(row));
  }
  if (rows.size() < kMinArchitectures) return reduce(std::move(rows));
  score_rows(space, rows, config, nullptr);
  return reduce(std::move(rows));
}

std::string to_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["tau_kappa"] = report.tau_kappa;
  j["tau_r"] = report.tau_r;
  j["tau_combined"] = report.tau_combined;
  j["n"] = report.n;
  j["tau_variant"] = "tau-b";
  if (report.tau_train_test) j["tau_train_test"] = *report.tau_train_test;
  j["combined_beats_single"] =
      std::abs(report.tau_combined) >= std::max(std::abs(report.tau_kappa), std::abs(report.tau_r));
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["arch_id"] = r.arch_id;
    if (std::isinf(r.kappa)) {
      row["kappa"] = "divergent";
    } else {
      row["kappa"] = r.kappa;
    }
    row["r_hat"] = r.r_hat;
    row["combined_rank"] = r.combined_rank;
    row["accuracy"] = r.accuracy;
    if (r.train_accuracy) row["train_accuracy"] = *r.train_accuracy;
    if (r.diverged) row["diverged"] = true;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
  out << "arch_id,kappa,r_hat,combined_rank,accuracy\n";
  for (const auto& r : report.rows) {
    out << r.arch_id << ',' << search::format_real(r.kappa) << ',' << search::format_real(r.r_hat) << ','
        << search::format_real(r.combined_rank) << ',' << search::format_real(r.accuracy) << '\n';
  }
}

}  // namespace tenas::harness
