#include <algorithm>
#include <string>

#include "tenas/common.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::space {

namespace {

using nn::Graph;
using nn::Shape;

class CellBuilder {
 public:
  CellBuilder(Graph& graph, const SpaceConfig& space) : g_(graph), space_(space) {}

  int conv(const std::string& name, int src, nn::Conv2dOptions opt) {
    int id = g_.add(name, std::make_shared<nn::Conv2d>(opt), src);
    if (space_.stacking.batch_norm) id = g_.add(name + ".bn", std::make_shared<nn::BatchNorm>(), id);
    return id;
  }

  int relu(const std::string& name, int src) {
    return g_.add(name, std::make_shared<nn::ReLU>(), src);
  }

  int pad_channels(const std::string& name, int src, std::size_t channels) {
    if (g_.node(src).shape[0] == channels) return src;
    return g_.add(name, std::make_shared<nn::ChannelPad>(channels), src);
  }

  /// One candidate operator on an edge. `stride` is 2 on edges leaving the
  /// input nodes of a reduction cell.
  int op(const std::string& prefix, const OperatorSpec& spec, int src, std::size_t c_out,
         std::size_t stride) {
    const Shape in = g_.node(src).shape;
    const std::size_t c_in = in[0];
    const std::size_t k = spec.kernel;
    switch (spec.kind) {
      case OpKind::Zero: {
        Shape out = in;
        out[0] = c_out;
        if (out.size() == 3 && stride > 1) {
          out[1] = (in[1] - 1) / stride + 1;
          out[2] = (in[2] - 1) / stride + 1;
        }
        return g_.add(prefix, std::make_shared<nn::Zero>(out), src);
      }
      case OpKind::Skip: {
        if (stride == 1 && c_in == c_out) return g_.add(prefix, std::make_shared<nn::Identity>(), src);
        int x = src;
        if (stride > 1) {
          x = g_.add(prefix + ".pool",
                     std::make_shared<nn::Pool2d>(nn::PoolMode::Average, 3, stride, 1), x);
        }
        return pad_channels(prefix + ".pad", x, c_out);
      }
      case OpKind::Conv: {
        const int x = relu(prefix + ".relu", src);
        return conv(prefix + ".conv", x, {c_in, c_out, k, stride, k / 2, 1, 1, false});
      }
      case OpKind::AvgPool:
      case OpKind::MaxPool: {
        const auto mode = spec.kind == OpKind::AvgPool ? nn::PoolMode::Average : nn::PoolMode::Max;
        const int x = g_.add(prefix + ".pool", std::make_shared<nn::Pool2d>(mode, k, stride, k / 2), src);
        return pad_channels(prefix + ".pad", x, c_out);
      }
      case OpKind::SepConv: {
        int x = relu(prefix + ".relu1", src);
        x = conv(prefix + ".dw1", x, {c_in, c_in, k, stride, k / 2, 1, c_in, false});
        x = conv(prefix + ".pw1", x, {c_in, c_in, 1, 1, 0, 1, 1, false});
        x = relu(prefix + ".relu2", x);
        x = conv(prefix + ".dw2", x, {c_in, c_in, k, 1, k / 2, 1, c_in, false});
        return conv(prefix + ".pw2", x, {c_in, c_out, 1, 1, 0, 1, 1, false});
      }
      case OpKind::DilConv: {
        int x = relu(prefix + ".relu", src);
        x = conv(prefix + ".dw", x, {c_in, c_in, k, stride, 2 * (k / 2), 2, c_in, false});
        return conv(prefix + ".pw", x, {c_in, c_out, 1, 1, 0, 1, 1, false});
      }
      case OpKind::Linear: {
        int x = src;
        for (std::size_t d = 0; d < spec.depth; ++d) {
          const std::string tag = prefix + ".l" + std::to_string(d);
          x = relu(tag + ".relu", x);
          x = g_.add(tag + ".fc", std::make_shared<nn::Linear>(c_in, c_out, true), x);
        }
        return x;
      }
    }
    throw InvariantError("unhandled operator kind");
  }

 private:
  Graph& g_;
  const SpaceConfig& space_;
};

}  // namespace

std::shared_ptr<const nn::Graph> realize(const SuperNet& net) {
  const SpaceConfig& space = net.space();
  const auto& st = space.stacking;
  const auto& topo = space.topology;
  auto graph = std::make_shared<Graph>(st.input_shape);
  CellBuilder b(*graph, space);

  int stem;
  if (space.image_input()) {
    stem = b.conv("stem.conv", Graph::input(), {st.input_shape[0], st.channels, 3, 1, 1, 1, 1, false});
  } else {
    stem = graph->add("stem.fc", std::make_shared<nn::Linear>(st.input_shape[0], st.channels, true),
                      Graph::input());
  }

  // Outputs of previous cells, most recent last; cells with several input
  // nodes read the most recent ones.
  std::vector<int> history{stem};
  for (std::size_t cell = 0; cell < st.cells; ++cell) {
    const std::string cname = "cell" + std::to_string(cell);
    const bool reduction =
        std::find(st.reductions.begin(), st.reductions.end(), cell) != st.reductions.end();
    const int prev = history.back();
    const Shape prev_shape = graph->node(prev).shape;
    const std::size_t c_out = reduction ? 2 * prev_shape[0] : prev_shape[0];

    std::vector<int> node_id(topo.node_count, -1);
    const std::size_t m = topo.input_nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t back = m - k;
      int src = history.size() >= back ? history[history.size() - back] : history.front();
      const Shape s = graph->node(src).shape;
      if (s != prev_shape) {
        // Older cell outputs are projected to the latest cell's shape.
        const std::size_t stride = s.size() == 3 ? s[1] / prev_shape[1] : 1;
        const std::string pname = cname + ".pre" + std::to_string(k);
        src = b.relu(pname + ".relu", src);
        src = b.conv(pname + ".conv", src, {s[0], prev_shape[0], 1, std::max<std::size_t>(stride, 1), 0, 1, 1, false});
      }
      node_id[topo.input_nodes[k]] = src;
    }

    for (std::size_t node = 0; node < topo.node_count; ++node) {
      if (topo.is_input(node)) continue;
      std::vector<int> terms;
      for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        const auto& edge = topo.edges[e];
        if (edge.to != node) continue;
        const std::size_t stride = reduction && topo.is_input(edge.from) ? 2 : 1;
        for (std::size_t op : net.candidates(e)) {
          const auto& spec = space.operators[op];
          terms.push_back(b.op(cname + ".e" + std::to_string(e) + "." + spec.name, spec,
                               node_id[edge.from], c_out, stride));
        }
      }
      node_id[node] = graph->add(cname + ".n" + std::to_string(node), std::make_shared<nn::Identity>(),
                                 std::move(terms));
    }
    std::vector<int> outs;
    for (auto o : topo.output_nodes) outs.push_back(node_id[o]);
    history.push_back(graph->add(cname + ".out", std::make_shared<nn::Identity>(), std::move(outs)));
  }

  int x = b.relu("head.relu", history.back());
  if (space.image_input()) x = graph->add("head.gap", std::make_shared<nn::GlobalAvgPool>(), x);
  const std::size_t width = graph->node(x).shape[0];
  x = graph->add("head.fc", std::make_shared<nn::Linear>(width, st.classes, false), x);
  graph->set_output(x);
  return graph;
}

}  // namespace tenas::space
