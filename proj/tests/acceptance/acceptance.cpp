// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tenas/harness/arrangement.hpp"
#include "tenas/harness/correlation.hpp"
#include "tenas/harness/datasets.hpp"
#include "tenas/harness/kendall.hpp"
#include "tenas/metrics/eigen.hpp"
#include "tenas/metrics/ntk.hpp"
#include "tenas/metrics/regions.hpp"
#include "tenas/nn/layers.hpp"
#include "tenas/search/importance.hpp"
#include "tenas/search/pruning.hpp"
#include "tenas/search/trajectory.hpp"
#include "tenas/space/supernet.hpp"

namespace {

using namespace tenas;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::shared_ptr<const space::SpaceConfig> toy() {
  return std::make_shared<const space::SpaceConfig>(space::preset("toy-mlp"));
}

Outcome gradient_oracle() {
  const auto start = Clock::now();
  std::size_t failures = 0, skipped = 0, short_nets = 0;
  double worst = 0.0;
  const std::vector<space::SpaceConfig> spaces{testing::tiny_space("nasbench201-like"),
                                               testing::tiny_space("darts-like"), testing::tiny_space("toy-mlp")};
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto graph = i < 35 ? testing::random_graph(1000 + i) : testing::random_supernet_graph(spaces[i % 3], i);
    nn::Network net(graph);
    net.initialize(i);
    const auto x = nn::Tensor::standard_normal(nn::batched(3, graph->input_shape()), 77 + i);
    const auto j = net.per_sample_jacobian(x);
    std::mt19937_64 rng(i);
    const auto check = testing::check_jacobian(net, x, j, 100, rng);
    failures += check.failures;
    skipped += check.skipped_kinks;
    short_nets += check.checked < 100;
    worst = std::max(worst, check.worst_relative);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {failures == 0 && short_nets == 0 && secs < 120,
          fmt("50 nets x 100 coords, %zu failures, worst rel err %.2e, %zu kink coords resampled, %.1f s", failures,
              worst, skipped, secs)};
}

Outcome analytic_ntk() {
  double worst_entry = 0, worst_kappa = 0;
  for (std::uint64_t b = 0; b < 20; ++b) {
    const std::size_t n = 6, d = 9;
    auto g = std::make_shared<nn::Graph>(nn::Shape{d});
    g->set_output(g->add("w", std::make_shared<nn::Linear>(d, 1, false), nn::Graph::input()));
    nn::Network net(g);
    net.initialize(b);
    const auto x = nn::Tensor::standard_normal({n, d}, 500 + b);
    const auto theta = metrics::compute_ntk(net, x);
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0;
        for (std::size_t c = 0; c < d; ++c) s += x[i * d + c] * x[k * d + c];
        gram(i, k) = s;
        worst_entry = std::max(worst_entry, std::abs(theta(i, k) - s));
      }
    const double kappa = metrics::condition_number(metrics::symmetric_eigenvalues(theta));
    const double ref = testing::reference_condition_number(gram);
    worst_kappa = std::max(worst_kappa, std::abs(kappa - ref) / ref);
  }
  return {worst_entry <= 1e-10 && worst_kappa <= 1e-8,
          fmt("20 batches, max |NTK - XX^T| %.1e, max rel kappa error %.1e", worst_entry, worst_kappa)};
}

Outcome psd_spectrum() {
  std::size_t bad = 0;
  double worst_ratio = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto graph = testing::random_graph(2000 + i);
    nn::Network net(graph);
    net.initialize(i);
    const auto theta = metrics::compute_ntk(net, nn::Tensor::standard_normal(nn::batched(8, graph->input_shape()), i));
    const auto ev = metrics::symmetric_eigenvalues(theta);
    const double kappa = metrics::condition_number(ev);
    if (theta.relative_asymmetry() != 0.0) ++bad;
    if (ev.front() > 0) worst_ratio = std::min(worst_ratio, ev.back() / ev.front());
    if (ev.back() < -1e-6 * ev.front() || !(kappa >= 1.0)) ++bad;
  }
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  double worst_eig = 0;
  for (int t = 0; t < 100; ++t) {
    Matrix m(8, 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i; j < 8; ++j) m(i, j) = m(j, i) = g(rng);
    const auto ours = metrics::symmetric_eigenvalues(m);
    const auto ref = testing::reference_eigenvalues(m);
    for (std::size_t i = 0; i < 8; ++i) worst_eig = std::max(worst_eig, std::abs(ours[i] - ref[i]));
  }
  return {bad == 0 && worst_eig <= 1e-8,
          fmt("50 nets, %zu violations, min lambda_m/lambda_0 %.1e; 100 8x8 matrices, max eigen error %.1e", bad,
              worst_ratio, worst_eig)};
}

// Grid over the bounding box of every vertex of the arrangement and of each
// line's point nearest the origin, with a margin, so every region reaches
// into the box.
nn::Tensor arrangement_grid(const std::vector<harness::Hyperplane2d>& lines) {
  std::array<double, 2> lo{-1, -1}, hi{1, 1};
  const auto include = [&](double x, double y) {
    lo = {std::min(lo[0], x), std::min(lo[1], y)};
    hi = {std::max(hi[0], x), std::max(hi[1], y)};
  };
  for (std::size_t a = 0; a < lines.size(); ++a) {
    const auto& p = lines[a];
    const double norm2 = p.w[0] * p.w[0] + p.w[1] * p.w[1];
    include(-p.b * p.w[0] / norm2, -p.b * p.w[1] / norm2);
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const auto& q = lines[b];
      const double det = p.w[0] * q.w[1] - p.w[1] * q.w[0];
      if (std::abs(det) < 1e-12) continue;
      include((-p.b * q.w[1] + q.b * p.w[1]) / det, (-q.b * p.w[0] + p.b * q.w[0]) / det);
    }
  }
  const double margin = 0.05 * std::max(hi[0] - lo[0], hi[1] - lo[1]);
  return testing::grid_2d(200, lo[0] - margin, hi[0] + margin, lo[1] - margin, hi[1] + margin);
}

Outcome region_oracle() {
  const auto start = Clock::now();
  std::size_t match = 0, exceed = 0, bound_violations = 0;
  // Asserted protocol: count_regions itself, one Kaiming draw (zero biases,
  // so every hidden line passes through the origin), grid as the input pool.
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t units = 1 + i % 6;
    const auto graph = testing::one_hidden_layer_graph(units);
    metrics::MeasureConfig config;
    config.repeats = 1;
    config.region_samples = 200 * 200;
    config.data = std::make_shared<const nn::Tensor>(testing::grid_2d(200, -1, 1));
    const metrics::SeedSchedule seeds{i, "region-oracle"};
    const auto report = metrics::count_regions(graph, config, seeds);

    nn::Network net(graph);
    net.initialize(seeds.param_seed(metrics::kRegionMetric, 0));
    const auto exact = harness::exact_regions_2d(testing::hidden_hyperplanes(net));
    const auto count = report.counts[0];
    match += count == exact;
    exceed += count > exact;
    bound_violations += count > report.samples_used || count > (std::size_t{1} << units);
  }

  // Reported only: the same networks with N(0, 1) biases, which gives
  // generic arrangements whose bounded cells can be far below grid spacing.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  std::size_t generic_match = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t units = 1 + i % 6;
    nn::Network net(testing::one_hidden_layer_graph(units));
    net.initialize(i);
    nn::Tensor bias({units});
    for (std::size_t u = 0; u < units; ++u) bias[u] = gauss(rng);
    net.params().assign(*net.params().find("hidden.bias"), bias);
    const auto lines = testing::hidden_hyperplanes(net);
    const auto exact = harness::exact_regions_2d(lines);
    const auto count = metrics::count_distinct_patterns(net, arrangement_grid(lines));
    generic_match += count == exact;
    exceed += count > exact;
    bound_violations += count > 200 * 200 || count > (std::size_t{1} << units);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {match >= 48 && exceed == 0 && bound_violations == 0 && secs < 180,
          fmt("%zu/50 exact matches at init; %zu overcounts, %zu bound violations over 100 nets; "
              "random-bias variant (not asserted) %zu/50; %.1f s",
              match, exceed, bound_violations, generic_match, secs)};
}

Outcome algorithm_mechanics() {
  const auto start = Clock::now();
  search::SearchConfig config;
  config.measure.base_seed = 7;
  const auto a = search::run_search(toy(), config);
  const auto b = search::run_search(toy(), config);
  std::ostringstream ja, jb, ca, cb;
  search::write_trajectory_jsonl(ja, a.trajectory, "manifest.json");
  search::write_trajectory_jsonl(jb, b.trajectory, "manifest.json");
  search::write_trajectory_csv(ca, a.trajectory);
  search::write_trajectory_csv(cb, b.trajectory);

  bool ok = a.trajectory.size() == 4;
  for (std::size_t t = 1; ok && t < a.trajectory.size(); ++t) {
    ok = a.trajectory[t - 1].slots - a.trajectory[t].slots == 3;
  }
  ok = ok && space::decode(a.arch_id, toy()).is_single_path();
  const bool identical = ja.str() == jb.str() && ca.str() == cb.str();

  const auto table = search::build_importance({{0, 0, 5, 2}, {0, 1, 1, 9}, {0, 2, 3, 4}}, search::Strategy::SumRank);
  const bool example = table.rows[0].s == 0 && table.rows[1].s == 4 && table.rows[2].s == 2 &&
                       table.argmin_per_edge().at(0) == 0;
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {ok && identical && example && secs < 60,
          fmt("%zu rounds, slots -3/round, single-path %s, byte-identical %s, hand example s=[%g,%g,%g], %.1f s",
              a.trajectory.size() - 1, ok ? "yes" : "no", identical ? "yes" : "no", table.rows[0].s,
              table.rows[1].s, table.rows[2].s, secs)};
}

Outcome rank_invariance() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  const std::vector<std::function<double(double)>> transforms{
      [](double x) { return 3 * x + 1; }, [](double x) { return std::exp(x); },
      [](double x) { return x * x * x + x; }, [](double x) { return std::sinh(x) - 4; }};
  std::size_t changed = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<search::DeltaRow> rows, warped;
    for (std::size_t e = 0; e < 6; ++e)
      for (std::size_t o = 0; o < 5; ++o) {
        const double dk = std::round(gauss(rng) * 4) / 4, dr = std::round(gauss(rng) * 4) / 4;
        rows.push_back({e, o, dk, dr});
      }
    const auto& fk = transforms[static_cast<std::size_t>(t) % transforms.size()];
    const auto& fr = transforms[static_cast<std::size_t>(t / 4 + 1) % transforms.size()];
    for (auto r : rows) {
      r.delta_kappa = fk(r.delta_kappa);
      r.delta_r = fr(r.delta_r);
      warped.push_back(r);
    }
    for (auto s : {search::Strategy::SumRank, search::Strategy::MinRank, search::Strategy::MaxRank}) {
      const auto a = search::build_importance(rows, s), b = search::build_importance(warped, s);
      const auto ma = a.argmin_per_edge(), mb = b.argmin_per_edge();
      for (const auto& [edge, idx] : ma) changed += a.rows[idx].op != b.rows[mb.at(edge)].op;
    }
  }
  return {changed == 0, fmt("20 tables x 3 strategies, %zu changed pruning choices", changed)};
}

Outcome kendall_values() {
  using V = std::vector<double>;
  const double a = harness::kendall_tau(V{1, 2, 3}, V{1, 2, 3});
  const double b = harness::kendall_tau(V{1, 2, 3}, V{3, 2, 1});
  const double c = harness::kendall_tau(V{1, 2, 3, 4}, V{1, 3, 2, 4});
  return {a == 1.0 && b == -1.0 && std::abs(c - 0.6667) <= 1e-4, fmt("%.4f, %.4f, %.4f", a, b, c)};
}

Outcome correlation_signs() {
  const auto start = Clock::now();
  const auto space = toy();
  std::size_t good = 0;
  std::string seeds;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = harness::make_dataset(harness::DatasetKind::Spiral, 300, 0.05, seed);
    harness::StudyConfig config;
    config.measure.base_seed = seed;
    config.train.seed = seed;
    const auto archs = harness::select_architectures(*space, 0, seed);
    const auto report = harness::correlation_study(space, archs, data, config);
    good += report.tau_kappa < 0 && report.tau_r > 0;
    seeds += fmt(" [seed %llu: n=%zu tau_k=%+.3f tau_r=%+.3f tau_comb=%+.3f]", static_cast<unsigned long long>(seed),
                 report.n, report.tau_kappa, report.tau_r, report.tau_combined);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {good >= 4 && secs < 900, fmt("%zu/5 seeds with tau_k<0 and tau_r>0, %.1f s;", good, secs) + seeds};
}

Outcome trajectory_logging() {
  std::size_t fields_ok = 0, improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    search::SearchConfig config;
    config.measure.base_seed = seed;
    const auto result = search::run_search(toy(), config);
    const auto& first = result.trajectory.front();
    bool ok = first.round == 0 && first.pruned.empty() && first.slots == 12;
    for (const auto& r : result.trajectory) {
      ok = ok && !std::isnan(r.kappa_mean) && (std::isfinite(r.kappa_mean) || r.kappa_mean > 0) &&
           std::isfinite(r.r_hat);
    }
    fields_ok += ok;
    improved += result.trajectory.back().kappa_mean <= first.kappa_mean;
  }
  std::string detail = fmt("record 0 valid in %zu/5 runs; final kappa <= kappa(N_0) in %zu/5 seeds", fields_ok,
                           improved);
  if (improved < 4) detail += " (warning: below 4/5, reported only)";
  return {fields_ok == 5, detail};
}

Outcome cost_accounting() {
  std::size_t violations = 0, rounds = 0;
  auto check = [&](std::shared_ptr<const space::SpaceConfig> space, search::SearchConfig config) {
    const auto result = search::run_search(space, config);
    const std::size_t cap = space->op_count() * space->edge_count() + 1;
    std::size_t total = result.trajectory.front().evaluations;
    for (std::size_t t = 1; t < result.trajectory.size(); ++t) {
      const auto& r = result.trajectory[t];
      ++rounds;
      total += r.evaluations;
      if (r.evaluations != result.trajectory[t - 1].slots + 1 || r.evaluations > cap) ++violations;
    }
    if (total != result.evaluations) ++violations;
  };
  search::SearchConfig config;
  check(toy(), config);
  auto two = space::preset("toy-mlp");
  two.target_ops_per_edge = 2;
  check(std::make_shared<const space::SpaceConfig>(two), config);
  config.measure.batch_size = 8;
  config.measure.region_samples = 100;
  config.measure.repeats = 1;
  check(std::make_shared<const space::SpaceConfig>(space::preset("nasbench201-like")), config);
  return {violations == 0, fmt("%zu rounds over 3 searches, %zu counter mismatches", rounds, violations)};
}

}  // namespace

// Optional arguments select criteria by number; none runs all ten.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"gradient oracle", gradient_oracle},     {"analytic NTK", analytic_ntk},
      {"PSD/spectrum", psd_spectrum},           {"region-count oracle", region_oracle},
      {"search mechanics", algorithm_mechanics}, {"rank invariance", rank_invariance},
      {"Kendall tau values", kendall_values},   {"correlation signs", correlation_signs},
      {"trajectory logging", trajectory_logging}, {"search cost accounting", cost_accounting},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    if (!only.empty() && std::find(only.begin(), only.end(), index) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << c.name << ": " << o.detail << std::endl;
  }
  const int ran = only.empty() ? 10 : static_cast<int>(only.size());
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
