#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "tenas/nn/layers.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng) { return pick(rng, 0, 1) == 1; }

int add_image_block(nn::Graph& g, int x, std::size_t index, std::mt19937_64& rng) {
  const auto& shape = g.node(x).shape;
  const std::size_t c = shape[0], h = std::min(shape[1], shape[2]);
  const std::string name = "b" + std::to_string(index);
  switch (pick(rng, 0, 5)) {
    case 0: {
      nn::Conv2dOptions o;
      o.in_channels = c;
      o.kernel = h >= 3 && coin(rng) ? 3 : 1;
      o.dilation = o.kernel == 3 && h >= 5 && coin(rng) ? 2 : 1;
      o.padding = o.kernel == 1 ? 0 : pick(rng, 0, o.dilation);
      o.stride = h >= 4 && coin(rng) ? 2 : 1;
      o.groups = coin(rng) ? c : 1;
      o.out_channels = o.groups == c ? c * pick(rng, 1, 2) : pick(rng, 2, 4);
      o.bias = coin(rng);
      const std::size_t reach = o.dilation * (o.kernel - 1) + 1;
      if (h + 2 * o.padding < reach) o.padding = (reach - h + 1) / 2;
      x = g.add(name + ".relu", std::make_shared<nn::ReLU>(), x);
      return g.add(name + ".conv", std::make_shared<nn::Conv2d>(o), x);
    }
    case 1:
      return g.add(name + ".avg", std::make_shared<nn::Pool2d>(nn::PoolMode::Average, 3, pick(rng, 1, 2), 1), x);
    case 2:
      return g.add(name + ".max", std::make_shared<nn::Pool2d>(nn::PoolMode::Max, 3, pick(rng, 1, 2), 1), x);
    case 3:
      return g.add(name + ".pad", std::make_shared<nn::ChannelPad>(c + pick(rng, 1, 2)), x);
    case 4: {
      nn::Conv2dOptions o{c, c, 3, 1, 1, 1, 1, false};
      const int relu = g.add(name + ".relu", std::make_shared<nn::ReLU>(), x);
      const int conv = g.add(name + ".conv", std::make_shared<nn::Conv2d>(o), relu);
      const int skip = g.add(name + ".skip", std::make_shared<nn::Identity>(), x);
      return g.add(name + ".sum", std::make_shared<nn::Identity>(), std::vector<int>{conv, skip});
    }
    default:
      return g.add(name + ".relu", std::make_shared<nn::ReLU>(), x);
  }
}

int add_vector_block(nn::Graph& g, int x, std::size_t index, std::mt19937_64& rng) {
  const std::size_t d = g.node(x).shape[0];
  const std::string name = "b" + std::to_string(index);
  if (coin(rng)) {
    const int relu = g.add(name + ".relu", std::make_shared<nn::ReLU>(), x);
    const int fc = g.add(name + ".fc", std::make_shared<nn::Linear>(d, d, coin(rng)), relu);
    return g.add(name + ".sum", std::make_shared<nn::Identity>(), std::vector<int>{fc, x});
  }
  const int relu = g.add(name + ".relu", std::make_shared<nn::ReLU>(), x);
  return g.add(name + ".fc", std::make_shared<nn::Linear>(d, pick(rng, 3, 6), coin(rng)), relu);
}

}  // namespace

std::shared_ptr<const nn::Graph> random_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool image = coin(rng);
  const nn::Shape input = image ? nn::Shape{pick(rng, 1, 3), pick(rng, 4, 6), pick(rng, 4, 6)}
                                : nn::Shape{pick(rng, 2, 5)};
  auto g = std::make_shared<nn::Graph>(input);
  int x = nn::Graph::input();
  if (!image) x = g->add("stem", std::make_shared<nn::Linear>(input[0], pick(rng, 3, 6), true), x);
  const std::size_t blocks = pick(rng, 2, 4);
  for (std::size_t b = 0; b < blocks; ++b) {
    x = image ? add_image_block(*g, x, b, rng) : add_vector_block(*g, x, b, rng);
  }
  x = g->add("head.relu", std::make_shared<nn::ReLU>(), x);
  if (image && coin(rng)) x = g->add("head.gap", std::make_shared<nn::GlobalAvgPool>(), x);
  const std::size_t width = nn::shape_numel(g->node(x).shape);
  x = g->add("head.fc", std::make_shared<nn::Linear>(width, pick(rng, 1, 3), coin(rng)), x);
  g->set_output(x);
  return g;
}

space::SpaceConfig tiny_space(const std::string& preset) {
  auto config = space::preset(preset);
  config.stacking.channels = 2;
  config.stacking.classes = 3;
  if (config.image_input()) {
    config.stacking.cells = 2;
    config.stacking.reductions = {1};
    config.stacking.input_shape = {2, 5, 5};
  } else {
    config.stacking.channels = 4;
  }
  config.validate();
  return config;
}

std::shared_ptr<const nn::Graph> random_supernet_graph(const space::SpaceConfig& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> candidates(space.edge_count());
  for (auto& ops : candidates) {
    for (std::size_t o = 0; o < space.op_count(); ++o)
      if (coin(rng)) ops.push_back(o);
    if (ops.size() < space.target_ops_per_edge) {
      ops.clear();
      for (std::size_t o = 0; o < space.target_ops_per_edge; ++o) ops.push_back(o + 1);
    }
  }
  return space::realize(space::SuperNet(std::make_shared<space::SpaceConfig>(space), candidates));
}

FiniteDifferenceCheck check_jacobian(nn::Network& net, const nn::Tensor& batch, const Matrix& jacobian,
                                     std::size_t coordinates, std::mt19937_64& rng, double h,
                                     double rel_tol, double abs_floor) {
  FiniteDifferenceCheck check;
  const std::size_t n = batch.batch();
  const std::size_t p_count = net.params().total_count();
  auto values = net.params().values();

  auto summed = [&] {
    const auto logits = net.forward(batch, false).logits;
    std::vector<double> out(n, 0.0);
    const std::size_t c = logits.sample_size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k) out[i] += logits[i * c + k];
    return out;
  };
  const auto base = summed();

  std::size_t attempts = 0;
  while (check.checked < coordinates && attempts < 20 * coordinates) {
    ++attempts;
    const std::size_t p = pick(rng, 0, p_count - 1);
    const std::size_t row = pick(rng, 0, n - 1);
    const double saved = values[p];
    values[p] = saved + h;
    const auto plus = summed();
    values[p] = saved - h;
    const auto minus = summed();
    values[p] = saved;

    const double forward_diff = (plus[row] - base[row]) / h;
    const double backward_diff = (base[row] - minus[row]) / h;
    const double scale = std::max({std::abs(forward_diff), std::abs(backward_diff), 1.0});
    if (std::abs(forward_diff - backward_diff) > 1e-7 * scale) {
      ++check.skipped_kinks;
      continue;
    }
    const double fd = (plus[row] - minus[row]) / (2 * h);
    const double analytic = jacobian(row, p);
    const double err = std::abs(fd - analytic);
    const double rel = err / std::max({std::abs(fd), std::abs(analytic), 1e-300});
    ++check.checked;
    if (std::max(std::abs(fd), std::abs(analytic)) > abs_floor) {
      check.worst_relative = std::max(check.worst_relative, rel);
    }
    if (err > abs_floor && rel >= rel_tol) ++check.failures;
  }
  return check;
}

std::vector<double> reference_eigenvalues(const Matrix& symmetric) {
  const auto n = static_cast<Eigen::Index>(symmetric.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = symmetric(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(out.rbegin(), out.rend());
  return out;
}

double reference_condition_number(const Matrix& symmetric) {
  const auto ev = reference_eigenvalues(symmetric);
  return ev.front() / ev.back();
}

std::shared_ptr<const nn::Graph> one_hidden_layer_graph(std::size_t units) {
  auto g = std::make_shared<nn::Graph>(nn::Shape{2});
  int x = g->add("hidden", std::make_shared<nn::Linear>(2, units, true), nn::Graph::input());
  x = g->add("relu", std::make_shared<nn::ReLU>(), x);
  x = g->add("out", std::make_shared<nn::Linear>(units, 1, true), x);
  g->set_output(x);
  return g;
}

std::vector<harness::Hyperplane2d> hidden_hyperplanes(const nn::Network& net) {
  const auto& params = net.params();
  const auto w = params.tensor(*params.find("hidden.weight"));
  const auto b = params.tensor(*params.find("hidden.bias"));
  std::vector<harness::Hyperplane2d> lines;
  for (std::size_t u = 0; u < b.size(); ++u) lines.push_back({{w[2 * u], w[2 * u + 1]}, b[u]});
  return lines;
}

nn::Tensor grid_2d(std::size_t n, double lo, double hi) { return grid_2d(n, lo, hi, lo, hi); }

nn::Tensor grid_2d(std::size_t n, double x_lo, double x_hi, double y_lo, double y_hi) {
  nn::Tensor grid({n * n, 2});
  const auto at = [n](double lo, double hi, std::size_t i) {
    return lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      grid[2 * (i * n + j)] = at(x_lo, x_hi, i);
      grid[2 * (i * n + j) + 1] = at(y_lo, y_hi, j);
    }
  }
  return grid;
}

}  // namespace tenas::testing
