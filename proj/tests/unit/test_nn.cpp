#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tenas/common.hpp"
#include "tenas/nn/layers.hpp"
#include "tenas/nn/network.hpp"

namespace tenas {
namespace {

using nn::Graph;
using nn::Network;
using nn::Shape;
using nn::Tensor;

std::shared_ptr<const Graph> chain(Shape input, std::vector<nn::LayerPtr> layers) {
  auto g = std::make_shared<Graph>(std::move(input));
  int x = Graph::input();
  for (std::size_t i = 0; i < layers.size(); ++i) x = g->add("l" + std::to_string(i), layers[i], x);
  g->set_output(x);
  return g;
}

TEST(Tensor, RejectsDataOfWrongLength) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.sample_size(), 3u);
}

TEST(Tensor, StandardNormalIsDeterministic) {
  EXPECT_EQ(Tensor::standard_normal({4, 5}, 11), Tensor::standard_normal({4, 5}, 11));
  EXPECT_NE(Tensor::standard_normal({4, 5}, 11), Tensor::standard_normal({4, 5}, 12));
}

TEST(Tensor, SliceCopiesSamples) {
  Tensor t({3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6});
  const auto s = t.slice(1, 3);
  EXPECT_EQ(s.shape(), (Shape{2, 2}));
  EXPECT_EQ(s[0], 3);
  EXPECT_EQ(s[3], 6);
}

TEST(KaimingInit, LinearOneByOneIsReproducible) {
  nn::Linear layer(1, 1, true);
  const auto a = nn::kaiming_init(layer, 5);
  const auto b = nn::kaiming_init(layer, 5);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1][0], 0.0);
}

TEST(KaimingInit, ConvStdMatchesFanIn) {
  nn::Conv2d conv({4, 8, 3, 1, 1, 1, 1, false});
  double sum = 0, sq = 0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; count < 100000; ++seed) {
    for (double w : nn::kaiming_init(conv, seed)[0].data()) {
      sum += w;
      sq += w * w;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double std = std::sqrt(sq / static_cast<double>(count) - mean * mean);
  EXPECT_NEAR(std, std::sqrt(2.0 / 36.0), 0.02 * std::sqrt(2.0 / 36.0));
}

TEST(KaimingInit, ParameterFreeLayersGetNothing) {
  EXPECT_TRUE(nn::kaiming_init(nn::Zero(), 1).empty());
  EXPECT_TRUE(nn::kaiming_init(nn::ReLU(), 1).empty());
  EXPECT_TRUE(nn::kaiming_init(nn::Pool2d(nn::PoolMode::Max, 3, 1, 1), 1).empty());
}

TEST(Conv2d, PreservesSpatialSizeAtStrideOne) {
  for (std::size_t k : {1, 3, 5}) {
    nn::Conv2d conv({2, 3, k, 1, k / 2, 1, 1, false});
    EXPECT_EQ(conv.output_shape({2, 7, 7}), (Shape{3, 7, 7}));
  }
  nn::Conv2d dil({2, 2, 3, 1, 2, 2, 2, false});
  EXPECT_EQ(dil.output_shape({2, 6, 6}), (Shape{2, 6, 6}));
}

TEST(Conv2d, MatchesHandComputedValue) {
  // 1 channel 3x3 input, 2x2 kernel of ones, no padding: each output is a window sum.
  auto g = chain({1, 3, 3}, {std::make_shared<nn::Conv2d>(nn::Conv2dOptions{1, 1, 2, 1, 0, 1, 1, false})});
  Network net(g);
  net.params().values()[0] = net.params().values()[1] = net.params().values()[2] = net.params().values()[3] = 1;
  Tensor x({1, 1, 3, 3}, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto out = net.forward(x).logits;
  EXPECT_EQ(out.shape(), (Shape{1, 1, 2, 2}));
  EXPECT_EQ(out[0], 12);
  EXPECT_EQ(out[3], 28);
}

TEST(Graph, ShapeMismatchNamesTheLayer) {
  auto g = std::make_shared<Graph>(Shape{3});
  const int a = g->add("fc_a", std::make_shared<nn::Linear>(3, 4), Graph::input());
  const int b = g->add("fc_b", std::make_shared<nn::Linear>(3, 5), Graph::input());
  try {
    g->add("merge", std::make_shared<nn::Identity>(), std::vector<int>{a, b});
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("merge"), std::string::npos);
  }
  try {
    g->add("fc_c", std::make_shared<nn::Linear>(7, 2), a);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("fc_c"), std::string::npos);
  }
}

TEST(Network, BatchShapeMismatchIsRejected) {
  Network net(chain({3}, {std::make_shared<nn::Linear>(3, 2)}));
  net.initialize(1);
  try {
    (void)net.forward(Tensor({2, 4}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("l0"), std::string::npos);
  }
}

TEST(Network, ZeroParametersGiveZeroLogitsAndEqualSignatures) {
  Network net(chain({3}, {std::make_shared<nn::Linear>(3, 4), std::make_shared<nn::ReLU>(),
                          std::make_shared<nn::Linear>(4, 2)}));
  const auto x = Tensor::standard_normal({5, 3}, 3);
  const auto r = net.forward(x);
  for (double v : r.logits.data()) EXPECT_EQ(v, 0.0);
  ASSERT_EQ(r.signatures.size(), 5u);
  for (const auto& s : r.signatures) {
    EXPECT_EQ(s, r.signatures[0]);
    for (std::size_t b = 0; b < s.size(); ++b) EXPECT_FALSE(s.bit(b));
  }
}

TEST(Network, NoReluMeansEmptySignatures) {
  Network net(chain({3}, {std::make_shared<nn::Identity>(), std::make_shared<nn::Identity>()}));
  const auto r = net.forward(Tensor::standard_normal({2, 3}, 1));
  ASSERT_EQ(r.signatures.size(), 2u);
  EXPECT_EQ(r.signatures[0].size(), 0u);
}

TEST(Network, SingleNeuronSignBits) {
  Network net(chain({1}, {std::make_shared<nn::Linear>(1, 1, true), std::make_shared<nn::ReLU>()}));
  net.params().values()[0] = 1.0;
  net.params().values()[1] = 0.0;
  const auto sigs = net.signatures(Tensor({3, 1}, std::vector<double>{-1.0, 1.0, 0.0}));
  EXPECT_FALSE(sigs[0].bit(0));
  EXPECT_TRUE(sigs[1].bit(0));
  EXPECT_FALSE(sigs[2].bit(0));  // exactly zero counts as inactive
}

TEST(Network, LinearJacobianRowIsTheInput) {
  Network net(chain({4}, {std::make_shared<nn::Linear>(4, 1, false)}));
  net.initialize(9);
  const auto x = Tensor::standard_normal({3, 4}, 2);
  const auto j = net.per_sample_jacobian(x);
  ASSERT_EQ(j.rows(), 3u);
  ASSERT_EQ(j.cols(), 4u);
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(j(n, p), x[n * 4 + p]);
}

TEST(Network, ZeroNetworkJacobianIsZero) {
  Network net(chain({3}, {std::make_shared<nn::Zero>(Shape{2})}));
  const auto j = net.per_sample_jacobian(Tensor::standard_normal({4, 3}, 1));
  EXPECT_EQ(j.cols(), 0u);
  Network with_head(chain({3}, {std::make_shared<nn::Zero>(Shape{2}), std::make_shared<nn::Linear>(2, 2)}));
  with_head.initialize(3);
  const auto jh = with_head.per_sample_jacobian(Tensor::standard_normal({4, 3}, 1));
  for (std::size_t i = 0; i < jh.rows(); ++i)
    for (std::size_t p = 0; p < jh.cols(); ++p) {
      // Only the head bias sees a nonzero gradient (d sum z / d b_c = 1).
      const bool bias = p >= 4;
      EXPECT_EQ(jh(i, p), bias ? 1.0 : 0.0);
    }
}

TEST(Network, PerLogitRowsSumToSummedRow) {
  auto graph = testing::random_graph(17);
  Network net(graph);
  net.initialize(4);
  const auto x = Tensor::standard_normal(nn::batched(3, graph->input_shape()), 5);
  const auto sum = net.per_sample_jacobian(x, nn::JacobianMode::SumLogits);
  const auto per = net.per_sample_jacobian(x, nn::JacobianMode::PerLogit);
  const std::size_t c = graph->output_shape().back();
  ASSERT_EQ(per.rows(), 3 * c);
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t p = 0; p < sum.cols(); ++p) {
      double total = 0;
      for (std::size_t k = 0; k < c; ++k) total += per(n * c + k, p);
      EXPECT_NEAR(total, sum(n, p), 1e-12 * (1 + std::abs(total)));
    }
}

TEST(Network, ParameterGradientIsJacobianTransposeProduct) {
  auto graph = testing::random_graph(23);
  Network net(graph);
  net.initialize(8);
  const auto x = Tensor::standard_normal(nn::batched(4, graph->input_shape()), 6);
  const std::size_t c = graph->output_shape().back();
  Tensor ones({4, c}, 1.0);
  const auto g = net.parameter_gradient(x, ones);
  const auto j = net.per_sample_jacobian(x);
  for (std::size_t p = 0; p < g.size(); ++p) {
    double total = 0;
    for (std::size_t n = 0; n < 4; ++n) total += j(n, p);
    EXPECT_NEAR(g[p], total, 1e-10 * (1 + std::abs(total)));
  }
}

TEST(Network, ForwardAndJacobianAreDeterministic) {
  auto graph = testing::random_graph(31);
  Network a(graph), b(graph);
  a.initialize(2);
  b.initialize(2);
  const auto x = Tensor::standard_normal(nn::batched(3, graph->input_shape()), 1);
  EXPECT_EQ(a.forward(x).logits, b.forward(x).logits);
  const auto ja = a.per_sample_jacobian(x);
  const auto jb = b.per_sample_jacobian(x);
  EXPECT_TRUE(std::equal(ja.data().begin(), ja.data().end(), jb.data().begin()));
}

TEST(Network, SignaturesAreScaleInvariantWithoutBiases) {
  auto g = std::make_shared<Graph>(Shape{2, 5, 5});
  int x = g->add("c1", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 3, 3, 1, 1, 1, 1, false}), Graph::input());
  x = g->add("r1", std::make_shared<nn::ReLU>(), x);
  x = g->add("c2", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{3, 3, 3, 2, 1, 1, 1, false}), x);
  x = g->add("r2", std::make_shared<nn::ReLU>(), x);
  x = g->add("fc", std::make_shared<nn::Linear>(27, 2, false), x);
  g->set_output(x);
  Network net(g);
  net.initialize(3);
  const auto in = Tensor::standard_normal({20, 2, 5, 5}, 4);
  const auto before = net.signatures(in);
  net.params().scale(3.7);
  EXPECT_EQ(net.signatures(in), before);
}

TEST(Network, InitializationIsPerNodeStable) {
  auto full = std::make_shared<Graph>(Shape{3});
  const int a = full->add("a", std::make_shared<nn::Linear>(3, 3), Graph::input());
  const int b = full->add("b", std::make_shared<nn::Linear>(3, 3), Graph::input());
  full->set_output(full->add("sum", std::make_shared<nn::Identity>(), std::vector<int>{a, b}));
  auto half = std::make_shared<Graph>(Shape{3});
  half->set_output(half->add("a", std::make_shared<nn::Linear>(3, 3), Graph::input()));
  Network nf(full), nh(half);
  nf.initialize(12);
  nh.initialize(12);
  EXPECT_EQ(nf.params().tensor(0), nh.params().tensor(0));
}

// Finite-difference oracle over every layer kind, one small network per kind.
class LayerGradient : public ::testing::TestWithParam<int> {};

std::shared_ptr<const Graph> single_kind_graph(int kind) {
  auto g = std::make_shared<Graph>(Shape{2, 6, 6});
  int x = Graph::input();
  auto relu = [&](const std::string& n) { x = g->add(n, std::make_shared<nn::ReLU>(), x); };
  switch (kind) {
    case 0: x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 3, 3, 1, 1, 1, 1, true}), x); break;
    case 1: x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 4, 3, 2, 1, 1, 1, false}), x); break;
    case 2: x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 2, 3, 1, 2, 2, 2, false}), x); break;
    case 3: x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 2, 5, 1, 2, 1, 1, false}), x); break;
    case 4:
      x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 2, 3, 1, 1, 1, 1, false}), x);
      x = g->add("avg", std::make_shared<nn::Pool2d>(nn::PoolMode::Average, 3, 2, 1), x);
      break;
    case 5:
      x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 2, 3, 1, 1, 1, 1, false}), x);
      x = g->add("max", std::make_shared<nn::Pool2d>(nn::PoolMode::Max, 3, 1, 1), x);
      break;
    case 6:
      x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 2, 1, 1, 0, 1, 1, false}), x);
      x = g->add("pad", std::make_shared<nn::ChannelPad>(4), x);
      break;
    default:
      x = g->add("conv", std::make_shared<nn::Conv2d>(nn::Conv2dOptions{2, 3, 3, 1, 1, 1, 1, false}), x);
      relu("relu");
      x = g->add("gap", std::make_shared<nn::GlobalAvgPool>(), x);
      break;
  }
  relu("head.relu");
  const std::size_t width = nn::shape_numel(g->node(x).shape);
  x = g->add("head", std::make_shared<nn::Linear>(width, 3, true), x);
  g->set_output(x);
  return g;
}

TEST_P(LayerGradient, MatchesCentralDifferences) {
  auto graph = single_kind_graph(GetParam());
  Network net(graph);
  net.initialize(static_cast<std::uint64_t>(GetParam()) + 100);
  for (auto& v : net.params().values()) v += 0.01;  // nonzero biases
  const auto x = Tensor::standard_normal(nn::batched(3, graph->input_shape()), 7);
  const auto j = net.per_sample_jacobian(x);
  std::mt19937_64 rng(GetParam());
  const auto check = testing::check_jacobian(net, x, j, 100, rng);
  EXPECT_EQ(check.checked, 100u);
  EXPECT_EQ(check.failures, 0u) << "worst relative error " << check.worst_relative;
}

INSTANTIATE_TEST_SUITE_P(AllKinds, LayerGradient, ::testing::Range(0, 8));

TEST(GradientOracle, CatchesACorruptedJacobian) {
  auto graph = single_kind_graph(0);
  Network net(graph);
  net.initialize(3);
  const auto x = Tensor::standard_normal(nn::batched(3, graph->input_shape()), 7);
  auto j = net.per_sample_jacobian(x);
  for (auto& v : j.data()) v *= 1.01;
  std::mt19937_64 rng(1);
  const auto check = testing::check_jacobian(net, x, j, 100, rng);
  EXPECT_GT(check.failures, 50u);
}

TEST(BatchNorm, NormalizesEachChannelOverTheBatch) {
  Network net(chain({2, 3, 3}, {std::make_shared<nn::BatchNorm>(0.0)}));
  const auto x = Tensor::standard_normal({4, 2, 3, 3}, 2);
  const auto y = net.forward(x).logits;
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0, sq = 0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t k = 0; k < 9; ++k) {
        const double v = y[n * 18 + c * 9 + k];
        sum += v;
        sq += v * v;
      }
    EXPECT_NEAR(sum / 36, 0.0, 1e-12);
    EXPECT_NEAR(sq / 36, 1.0, 1e-9);
  }
}

}  // namespace
}  // namespace tenas
