#include "tenas/space/space_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tenas/common.hpp"

namespace tenas::space {

using nlohmann::json;

namespace {

constexpr std::pair<OpKind, std::string_view> kKindNames[] = {
    {OpKind::Zero, "zero"},       {OpKind::Skip, "skip"},         {OpKind::Conv, "conv"},
    {OpKind::AvgPool, "avg_pool"}, {OpKind::MaxPool, "max_pool"}, {OpKind::SepConv, "sep_conv"},
    {OpKind::DilConv, "dil_conv"}, {OpKind::Linear, "linear"},
};

OpKind parse_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  throw ConfigError("unknown operator kind '" + std::string(s) + "'");
}

bool uses_kernel(OpKind k) {
  return k == OpKind::Conv || k == OpKind::AvgPool || k == OpKind::MaxPool ||
         k == OpKind::SepConv || k == OpKind::DilConv;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string_view op_kind_name(OpKind kind) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

// ---- CellTopology -----------------------------------------------------------------

bool CellTopology::is_input(std::size_t node) const {
  return std::find(input_nodes.begin(), input_nodes.end(), node) != input_nodes.end();
}

bool CellTopology::is_output(std::size_t node) const {
  return std::find(output_nodes.begin(), output_nodes.end(), node) != output_nodes.end();
}

bool CellTopology::is_intermediate(std::size_t node) const {
  if (is_input(node)) return false;
  if (output_nodes.size() == 1 && output_nodes.front() == node) {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.from == node; });
  }
  return true;
}

void CellTopology::validate() const {
  if (node_count < 2) throw ConfigError("cell needs at least 2 nodes");
  if (input_nodes.empty()) throw ConfigError("cell needs at least one input node");
  if (output_nodes.empty()) throw ConfigError("cell needs at least one output node");
  if (edges.empty()) throw ConfigError("cell needs at least one edge");
  for (auto n : input_nodes)
    if (n >= node_count) throw ConfigError("input node " + std::to_string(n) + " out of range");
  for (auto n : output_nodes) {
    if (n >= node_count) throw ConfigError("output node " + std::to_string(n) + " out of range");
    if (is_input(n)) throw ConfigError("node " + std::to_string(n) + " is both input and output");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.from >= node_count || e.to >= node_count) {
      throw ConfigError("edge " + std::to_string(i) + " references a node out of range");
    }
    if (e.from >= e.to) {
      throw ConfigError("edge " + std::to_string(i) + " (" + std::to_string(e.from) + "->" +
                        std::to_string(e.to) + ") is not forward; cells must be acyclic with from < to");
    }
    if (is_input(e.to)) throw ConfigError("edge " + std::to_string(i) + " enters an input node");
    for (std::size_t j = 0; j < i; ++j) {
      if (edges[j].from == e.from && edges[j].to == e.to) {
        throw ConfigError("duplicate edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
      }
    }
  }
  std::vector<bool> reached(node_count, false), reaches(node_count, false);
  for (auto n : input_nodes) reached[n] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : edges)
      if (reached[e.from] && !reached[e.to]) reached[e.to] = changed = true;
  }
  for (auto n : output_nodes) reaches[n] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : edges)
      if (reaches[e.to] && !reaches[e.from]) reaches[e.from] = changed = true;
  }
  for (std::size_t n = 0; n < node_count; ++n) {
    if (is_input(n)) continue;
    if (!reached[n]) throw ConfigError("node " + std::to_string(n) + " is not reachable from an input");
    if (!reaches[n]) throw ConfigError("node " + std::to_string(n) + " does not reach the output");
  }
}

// ---- SpaceConfig ------------------------------------------------------------------

std::size_t SpaceConfig::op_index(std::string_view op_name) const {
  for (std::size_t i = 0; i < operators.size(); ++i)
    if (operators[i].name == op_name) return i;
  throw ConfigError("unknown operator '" + std::string(op_name) + "' in space '" + name + "'");
}

void SpaceConfig::validate() const {
  topology.validate();
  if (operators.empty()) throw ConfigError("space has no operators");
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto& op = operators[i];
    if (op.name.empty()) throw ConfigError("operator " + std::to_string(i) + " has no name");
    if (op.name.find_first_of(":|+ \t\n") != std::string::npos) {
      throw ConfigError("operator name '" + op.name + "' contains a reserved character");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (operators[j].name == op.name) throw ConfigError("duplicate operator '" + op.name + "'");
    if (uses_kernel(op.kind) && (op.kernel == 0 || op.kernel % 2 == 0)) {
      throw ConfigError("operator '" + op.name + "' needs an odd kernel size");
    }
    const bool vector_op = op.kind == OpKind::Linear;
    const bool generic = op.kind == OpKind::Zero || op.kind == OpKind::Skip;
    if (!generic && vector_op == image_input()) {
      throw ConfigError("operator '" + op.name + "' (" + std::string(op_kind_name(op.kind)) +
                        ") does not apply to input shape " +
                        nn::shape_string(stacking.input_shape));
    }
    if (op.kind == OpKind::Linear && op.depth == 0) {
      throw ConfigError("operator '" + op.name + "' needs depth >= 1");
    }
  }
  if (target_ops_per_edge == 0 || target_ops_per_edge > operators.size()) {
    throw ConfigError("target_ops_per_edge must be in [1, " + std::to_string(operators.size()) + "]");
  }
  const auto& s = stacking;
  if (s.input_shape.size() != 1 && s.input_shape.size() != 3) {
    throw ConfigError("input_shape must be [C, H, W] or [D]");
  }
  if (nn::shape_numel(s.input_shape) == 0) throw ConfigError("input_shape has a zero dimension");
  if (s.cells == 0 || s.channels == 0 || s.classes == 0) {
    throw ConfigError("stacking needs cells, channels, and classes >= 1");
  }
  for (auto r : s.reductions) {
    if (r >= s.cells) throw ConfigError("reduction position " + std::to_string(r) + " >= cells");
    if (!image_input()) throw ConfigError("reduction cells need image input");
  }
}

SpaceConfig SpaceConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("space config is not valid JSON: ") + e.what());
  }
  SpaceConfig c;
  try {
    c.name = get_or<std::string>(j, "name", "custom");
    c.topology.node_count = j.at("nodes").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
      c.topology.edges.push_back({e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>()});
    }
    c.topology.input_nodes =
        get_or<std::vector<std::size_t>>(j, "input_nodes", std::vector<std::size_t>{0});
    if (j.contains("output_nodes")) {
      c.topology.output_nodes = j.at("output_nodes").get<std::vector<std::size_t>>();
    } else if (j.contains("output")) {
      c.topology.output_nodes = {j.at("output").get<std::size_t>()};
    } else if (c.topology.node_count > 0) {
      c.topology.output_nodes = {c.topology.node_count - 1};
    }
    for (const auto& o : j.at("operators")) {
      OperatorSpec op;
      if (o.is_string()) {
        throw ConfigError("operator entries must be objects with name and kind");
      }
      op.name = o.at("name").get<std::string>();
      op.kind = parse_kind(o.at("kind").get<std::string>());
      op.kernel = get_or<std::size_t>(o, "kernel", 3);
      op.depth = get_or<std::size_t>(o, "depth", 1);
      c.operators.push_back(std::move(op));
    }
    const auto& s = j.at("stacking");
    c.stacking.cells = get_or<std::size_t>(s, "cells", 1);
    c.stacking.channels = s.at("channels").get<std::size_t>();
    c.stacking.reductions = get_or<std::vector<std::size_t>>(s, "reductions", {});
    c.stacking.input_shape = s.at("input_shape").get<std::vector<std::size_t>>();
    c.stacking.classes = s.at("classes").get<std::size_t>();
    c.stacking.batch_norm = get_or<bool>(s, "batch_norm", false);
    c.target_ops_per_edge = get_or<std::size_t>(j, "target_ops_per_edge", 1);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("space config: ") + e.what());
  }
  c.validate();
  return c;
}

SpaceConfig SpaceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open space config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string SpaceConfig::to_json() const {
  json j;
  j["name"] = name;
  j["nodes"] = topology.node_count;
  j["edges"] = json::array();
  for (const auto& e : topology.edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}});
  j["input_nodes"] = topology.input_nodes;
  j["output_nodes"] = topology.output_nodes;
  j["operators"] = json::array();
  for (const auto& op : operators) {
    json o{{"name", op.name}, {"kind", op_kind_name(op.kind)}};
    if (uses_kernel(op.kind)) o["kernel"] = op.kernel;
    if (op.kind == OpKind::Linear) o["depth"] = op.depth;
    j["operators"].push_back(std::move(o));
  }
  j["stacking"] = {{"cells", stacking.cells},
                   {"channels", stacking.channels},
                   {"reductions", stacking.reductions},
                   {"input_shape", stacking.input_shape},
                   {"classes", stacking.classes},
                   {"batch_norm", stacking.batch_norm}};
  j["target_ops_per_edge"] = target_ops_per_edge;
  return j.dump(2);
}

}  // namespace tenas::space
