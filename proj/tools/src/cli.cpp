#include "tenas/cli/cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "manifest.hpp"
#include "tenas/common.hpp"
#include "tenas/harness/benchmark_table.hpp"
#include "tenas/harness/correlation.hpp"
#include "tenas/harness/datasets.hpp"
#include "tenas/metrics/data_file.hpp"
#include "tenas/metrics/score.hpp"
#include "tenas/search/pruning.hpp"
#include "tenas/search/trajectory.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kEnumerateLimit = 1'000'000;

struct Options {
  std::string space;
  std::string arch;
  std::optional<std::uint64_t> seed;
  std::size_t batch_size = 32;
  std::size_t region_samples = 3000;
  std::size_t repeats = 3;
  std::string strategy = "sum-rank";
  std::optional<std::size_t> target_ops;
  std::string benchmark;
  std::string out_dir = "tenas-out";
  std::string data;
  bool per_logit = false;
  std::size_t jobs = 1;
  bool force = false;
  bool verbose = false;

  // correlate
  std::string dataset = "spiral";
  std::size_t points = 300;
  double noise = 0.05;
  std::size_t architectures = 0;
  std::size_t epochs = 2000;
  double lr = 0.1;
};

json real(double value) {
  if (std::isinf(value) && value > 0) return "divergent";
  return value;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  const char* env = std::getenv("TENAS_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto value = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(std::string("TENAS_SEED is not an unsigned integer: '") + env + "'");
  }
}

std::shared_ptr<const space::SpaceConfig> load_space(const Options& o) {
  auto config = space::load_space(o.space);
  if (o.target_ops) {
    config.target_ops_per_edge = *o.target_ops;
    config.validate();
  }
  return std::make_shared<const space::SpaceConfig>(std::move(config));
}

metrics::MeasureConfig measure_config(const Options& o, std::uint64_t seed) {
  metrics::MeasureConfig m;
  m.batch_size = o.batch_size;
  m.region_samples = o.region_samples;
  m.repeats = o.repeats;
  m.base_seed = seed;
  m.jacobian_mode = o.per_logit ? nn::JacobianMode::PerLogit : nn::JacobianMode::SumLogits;
  m.jobs = o.jobs;
  if (!o.data.empty()) m.data = std::make_shared<const nn::Tensor>(metrics::read_tensor_file(o.data));
  return m;
}

json measure_json(const metrics::MeasureConfig& m) {
  return {{"batch_size", m.batch_size},
          {"region_samples", m.region_samples},
          {"repeats", m.repeats},
          {"base_seed", m.base_seed},
          {"jacobian_mode", m.jacobian_mode == nn::JacobianMode::PerLogit ? "per-logit" : "sum-logits"},
          {"jobs", m.jobs}};
}

void record_space(Manifest& manifest, const Options& o, const space::SpaceConfig& space) {
  manifest.data()["space"] = o.space;
  manifest.data()["space_config"] = json::parse(space.to_json());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

int cmd_search(const Options& o, Manifest& manifest, std::ostream& out, spdlog::logger& log) {
  const auto space = load_space(o);
  search::SearchConfig config;
  config.strategy = search::parse_strategy(o.strategy);
  config.measure = measure_config(o, resolve_seed(o));
  record_space(manifest, o, *space);
  auto search_json = measure_json(config.measure);
  search_json["strategy"] = search::strategy_name(config.strategy);
  manifest.data()["search_config"] = search_json;
  manifest.data()["base_seed"] = config.measure.base_seed;
  const auto jsonl_path = manifest.output("trajectory.jsonl");
  const auto csv_path = manifest.output("trajectory.csv");
  manifest.write();

  log.info("search over {} ({} edges, {} operators), strategy {}", space->name, space->edge_count(),
           space->op_count(), search::strategy_name(config.strategy));
  const auto result = search::run_search(space, config);
  for (const auto& r : result.trajectory) {
    log.info("round {}: kappa {} r_hat {} slots {} ({} evaluations, {:.2f} s)", r.round,
             search::format_real(r.kappa_mean), r.r_hat, r.slots, r.evaluations, r.wall_time);
  }

  std::ofstream jsonl(jsonl_path, std::ios::binary);
  search::write_trajectory_jsonl(jsonl, result.trajectory, kManifestName);
  std::ofstream csv(csv_path, std::ios::binary);
  search::write_trajectory_csv(csv, result.trajectory);
  if (!jsonl || !csv) throw ConfigError("cannot write trajectory files in " + manifest.out_dir().string());

  auto timings = json::array();
  for (const auto& r : result.trajectory) timings.push_back(r.wall_time);
  manifest.data()["round_wall_time"] = std::move(timings);
  manifest.data()["evaluations"] = result.evaluations;
  manifest.data()["result"] = result.arch_id;
  out << result.arch_id << '\n';
  return kExitOk;
}

int cmd_score(const Options& o, Manifest& manifest, std::ostream& out, spdlog::logger&) {
  const auto space = load_space(o);
  const auto measure = measure_config(o, resolve_seed(o));
  const auto net = space::decode(o.arch, space);
  const auto arch = net.encode();
  record_space(manifest, o, *space);
  manifest.data()["search_config"] = measure_json(measure);
  manifest.data()["base_seed"] = measure.base_seed;
  manifest.data()["arch"] = arch;
  const auto score_path = manifest.output("score.json");
  manifest.write();

  const auto s = metrics::score(space::realize(net), arch, measure);
  const auto dw = space::cell_depth_width(net);
  json result;
  result["arch"] = arch;
  result["kappa_mean"] = real(s.ntk.kappa_mean);
  auto per_repeat = json::array();
  for (double k : s.ntk.per_repeat) per_repeat.push_back(real(k));
  result["kappa_per_repeat"] = std::move(per_repeat);
  result["r_hat"] = s.regions.r_hat;
  result["counts"] = s.regions.counts;
  result["depth"] = dw.depth;
  result["width"] = dw.width;
  result["manifest"] = kManifestName;
  const auto text = result.dump(2);
  write_file(score_path, text + "\n");
  out << text << '\n';
  return kExitOk;
}

int cmd_correlate(const Options& o, Manifest& manifest, std::ostream& out, spdlog::logger& log) {
  const auto space = load_space(o);
  const auto seed = resolve_seed(o);
  harness::StudyConfig config;
  config.measure = measure_config(o, seed);
  config.jobs = o.jobs;
  config.architectures = o.architectures;
  config.sample_seed = seed;
  config.train.epochs = o.epochs;
  config.train.lr = o.lr;
  config.train.seed = seed;
  record_space(manifest, o, *space);
  auto study = measure_json(config.measure);
  if (o.benchmark.empty()) {
    study["dataset"] = o.dataset;
    study["points"] = o.points;
    study["noise"] = o.noise;
    study["architectures"] = o.architectures;
    study["epochs"] = o.epochs;
    study["lr"] = o.lr;
  } else {
    study["benchmark"] = o.benchmark;
  }
  manifest.data()["search_config"] = std::move(study);
  manifest.data()["base_seed"] = seed;
  const auto json_path = manifest.output("correlation.json");
  const auto csv_path = manifest.output("correlation.csv");
  manifest.write();

  harness::CorrelationReport report;
  if (!o.benchmark.empty()) {
    const auto table = harness::ingest_benchmark(o.benchmark, *space);
    for (const auto& w : table.warnings) log.warn("{}", w);
    for (const auto& r : table.rejected) log.warn("rejected {}", r);
    log.info("scoring {} architectures from {}", table.rows.size(), o.benchmark);
    report = harness::correlation_study(space, table, config);
  } else {
    const auto data = harness::make_dataset(harness::parse_dataset(o.dataset), o.points, o.noise, seed);
    const auto archs = harness::select_architectures(*space, o.architectures, seed);
    log.info("scoring and training {} architectures on {}", archs.size(), o.dataset);
    report = harness::correlation_study(space, archs, data, config);
  }
  write_file(json_path, harness::to_json(report) + "\n");
  std::ofstream csv(csv_path, std::ios::binary);
  harness::write_correlation_csv(csv, report);

  json summary;
  summary["tau_kappa"] = report.tau_kappa;
  summary["tau_r"] = report.tau_r;
  summary["tau_combined"] = report.tau_combined;
  summary["n"] = report.n;
  if (report.tau_train_test) summary["tau_train_test"] = *report.tau_train_test;
  manifest.data()["result"] = summary;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_enumerate(const Options& o, Manifest& manifest, std::ostream& out, spdlog::logger&) {
  const auto space = load_space(o);
  const auto count = space::architecture_count(*space);
  if (count > kEnumerateLimit && !o.force) {
    const auto shown = count == std::numeric_limits<std::size_t>::max() ? "more than 10^19" : std::to_string(count);
    throw ConfigError("space has " + shown + " architectures (limit " +
                      std::to_string(kEnumerateLimit) + "); pass --force to enumerate anyway");
  }
  record_space(manifest, o, *space);
  manifest.data()["count"] = count;
  manifest.write();
  for (const auto& id : space::enumerate_architectures(*space, std::numeric_limits<std::size_t>::max())) {
    out << id << '\n';
  }
  return kExitOk;
}

void add_measure_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Base seed (falls back to TENAS_SEED, then 0)");
  cmd->add_option("--batch-size", o.batch_size, "NTK mini-batch size")->capture_default_str();
  cmd->add_option("--region-samples", o.region_samples, "Inputs used to count linear regions")
      ->capture_default_str();
  cmd->add_option("--repeats", o.repeats, "Independent initializations averaged")->capture_default_str();
  cmd->add_option("--data", o.data, "Input pool file (tensor format) instead of Gaussian inputs");
  cmd->add_flag("--per-logit", o.per_logit, "One Jacobian row per (sample, logit)");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_space_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--space", o.space, "Preset name or space JSON file")->required();
  cmd->add_option("--target-ops-per-edge", o.target_ops, "Operators kept per edge");
  cmd->add_option("--out-dir", o.out_dir, "Directory for the manifest and output files")->capture_default_str();
  cmd->add_flag("-v,--verbose", o.verbose, "Debug logging");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Training-free architecture search by NTK condition number and linear-region count", "tenas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TENAS_VERSION);

  auto* search_cmd = app.add_subcommand("search", "Prune a supernet down to a single-path architecture");
  add_space_flags(search_cmd, o);
  add_measure_flags(search_cmd, o);
  search_cmd->add_option("--strategy", o.strategy, "sum-rank, min-rank, max-rank or raw-sum")
      ->capture_default_str()
      ->check(CLI::IsMember({"sum-rank", "min-rank", "max-rank", "raw-sum"}));

  auto* score_cmd = app.add_subcommand("score", "Score one architecture");
  add_space_flags(score_cmd, o);
  add_measure_flags(score_cmd, o);
  score_cmd->add_option("--arch", o.arch, "ArchId, e.g. e0:skip|e1:conv3x3|...")->required();

  auto* corr_cmd = app.add_subcommand("correlate", "Kendall tau of the metrics against accuracy");
  add_space_flags(corr_cmd, o);
  add_measure_flags(corr_cmd, o);
  corr_cmd->add_option("--benchmark", o.benchmark, "CSV arch_id,test_accuracy[,train_accuracy]");
  corr_cmd->add_option("--dataset", o.dataset, "spiral, moons or gaussians")->capture_default_str();
  corr_cmd->add_option("--points", o.points, "Dataset size")->capture_default_str();
  corr_cmd->add_option("--noise", o.noise, "Dataset noise")->capture_default_str();
  corr_cmd->add_option("--archs", o.architectures, "Architectures to sample (0 = all)")->capture_default_str();
  corr_cmd->add_option("--epochs", o.epochs, "Oracle training epoch cap")->capture_default_str();
  corr_cmd->add_option("--lr", o.lr, "Oracle learning rate")->capture_default_str();

  auto* enum_cmd = app.add_subcommand("enumerate", "List every single-path architecture");
  add_space_flags(enum_cmd, o);
  enum_cmd->add_flag("--force", o.force, "Enumerate spaces above 10^6 architectures");

  std::vector<const char*> argv{"tenas"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(TENAS_VERSION) + "\n" : app.help());
      return kExitOk;
    }
    err << "tenas: " << e.what() << '\n';
    return kExitUserError;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  spdlog::logger log("tenas", sink);
  log.set_pattern("[%H:%M:%S %l] %v");
  log.set_level(o.verbose ? spdlog::level::debug : spdlog::level::info);

  CLI::App* cmd = app.get_subcommands().front();
  std::optional<Manifest> manifest;
  try {
    manifest.emplace(o.out_dir, cmd->get_name(), args);
    int code = kExitOk;
    if (cmd == search_cmd) code = cmd_search(o, *manifest, out, log);
    if (cmd == score_cmd) code = cmd_score(o, *manifest, out, log);
    if (cmd == corr_cmd) code = cmd_correlate(o, *manifest, out, log);
    if (cmd == enum_cmd) code = cmd_enumerate(o, *manifest, out, log);
    manifest->finish("ok");
    return code;
  } catch (const InvariantError& e) {
    log.critical("internal error: {}", e.what());
    if (manifest) manifest->data()["status"] = "failed";
    return kExitInternalError;
  } catch (const Error& e) {
    log.error("{}", e.what());
    return kExitUserError;
  } catch (const std::filesystem::filesystem_error& e) {
    log.error("{}", e.what());
    return kExitUserError;
  } catch (const std::exception& e) {
    log.critical("internal error: {}", e.what());
    return kExitInternalError;
  }
}

}  // namespace tenas::cli
