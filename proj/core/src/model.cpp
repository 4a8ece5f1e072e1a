#include "blindguard/model.hpp"

#include <cmath>
#include <random>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

struct NamedLayer {
  LayerKind kind;
  std::string_view name;
};

constexpr NamedLayer kLayerNames[] = {{LayerKind::conv, "conv"},
                                      {LayerKind::maxpool2, "maxpool2"},
                                      {LayerKind::relu, "relu"},
                                      {LayerKind::flatten, "flatten"},
                                      {LayerKind::dense, "dense"}};

std::vector<Shape> parameter_shapes(const Architecture& arch) {
  const std::vector<Shape> shapes = arch.infer_shapes();
  std::vector<Shape> out;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& l = arch.layers[i];
    if (l.kind == LayerKind::conv) {
      out.push_back({l.units, shapes[i][0], l.kernel, l.kernel});
      out.push_back({l.units});
    } else if (l.kind == LayerKind::dense) {
      out.push_back({shapes[i][0], l.units});
      out.push_back({l.units});
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& e : kLayerNames)
    if (e.kind == kind) return e.name;
  return "unknown";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (const auto& e : kLayerNames)
    if (e.name == name) return e.kind;
  throw ConfigError("unknown layer kind '" + std::string(name) + "'");
}

Architecture Architecture::mnist(std::size_t in_channels) {
  Architecture a;
  a.in_channels = in_channels;
  a.layers = {LayerSpec::conv(5, 32), LayerSpec::relu(),     LayerSpec::maxpool2(), LayerSpec::conv(5, 64),
              LayerSpec::relu(),      LayerSpec::maxpool2(), LayerSpec::flatten(),  LayerSpec::dense(128),
              LayerSpec::relu(),      LayerSpec::dense(10)};
  return a;
}

Architecture Architecture::cifar_small(std::size_t in_channels) {
  Architecture a;
  a.in_channels = in_channels;
  a.height = a.width = 32;
  a.layers = {LayerSpec::conv(3, 32), LayerSpec::relu(),     LayerSpec::maxpool2(), LayerSpec::conv(3, 64),
              LayerSpec::relu(),      LayerSpec::maxpool2(), LayerSpec::flatten(),  LayerSpec::dense(128),
              LayerSpec::relu(),      LayerSpec::dense(10)};
  return a;
}

std::vector<Shape> Architecture::infer_shapes() const {
  if (in_channels == 0 || height == 0 || width == 0) throw ConfigError("architecture: empty input shape");
  std::vector<Shape> shapes{{in_channels, height, width}};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const Shape& in = shapes.back();
    const std::string where = "layer " + std::to_string(i) + " (" + std::string(to_string(l.kind)) + ")";
    switch (l.kind) {
      case LayerKind::conv: {
        if (in.size() != 3) throw ConfigError(where + ": expects an image input, got " + to_string(in));
        if (l.kernel % 2 == 0 || l.units == 0) throw ConfigError(where + ": kernel must be odd, channels > 0");
        if (padding == Padding::same) {
          shapes.push_back({l.units, in[1], in[2]});
        } else {
          if (in[1] < l.kernel || in[2] < l.kernel) throw ConfigError(where + ": kernel larger than " + to_string(in));
          shapes.push_back({l.units, in[1] - l.kernel + 1, in[2] - l.kernel + 1});
        }
        break;
      }
      case LayerKind::maxpool2:
        if (in.size() != 3 || in[1] < 2 || in[2] < 2) throw ConfigError(where + ": cannot pool " + to_string(in));
        shapes.push_back({in[0], in[1] / 2, in[2] / 2});
        break;
      case LayerKind::relu: shapes.push_back(in); break;
      case LayerKind::flatten: shapes.push_back({element_count(in)}); break;
      case LayerKind::dense:
        if (in.size() != 1) throw ConfigError(where + ": expects a flat input, got " + to_string(in));
        if (l.units == 0) throw ConfigError(where + ": zero units");
        shapes.push_back({l.units});
        break;
    }
  }
  if (shapes.back() != Shape{classes}) {
    throw ConfigError("architecture: output " + to_string(shapes.back()) + " is not " + std::to_string(classes) +
                      " logits");
  }
  return shapes;
}

Model::Model(Architecture arch, std::vector<Tensor> parameters) : arch_(std::move(arch)), params_(std::move(parameters)) {
  const auto expected = parameter_shapes(arch_);
  if (expected.size() != params_.size()) {
    throw ConfigError("model: architecture needs " + std::to_string(expected.size()) + " parameter tensors, got " +
                      std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (params_[i].shape() != expected[i]) {
      throw ConfigError("model: parameter " + std::to_string(i) + " has shape " + to_string(params_[i].shape()) +
                        ", expected " + to_string(expected[i]));
    }
  }
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& p : params_) n += p.size();
  return n;
}

std::vector<Var> Model::bind(Graph& graph, bool track) const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const Tensor& p : params_) vars.push_back(graph.leaf(p, track));
  return vars;
}

Var Model::forward(Var input, std::span<const Var> params) const {
  const Shape& s = input.shape();
  if (s.size() != 4 || s[1] != arch_.in_channels || s[2] != arch_.height || s[3] != arch_.width) {
    throw DimensionError("model expects [batch x " + std::to_string(arch_.in_channels) + " x " +
                         std::to_string(arch_.height) + " x " + std::to_string(arch_.width) + "], got " +
                         to_string(s));
  }
  Var x = input;
  std::size_t p = 0;
  for (const LayerSpec& l : arch_.layers) {
    switch (l.kind) {
      case LayerKind::conv:
        x = add_channel_bias(conv2d(x, params[p], arch_.padding), params[p + 1]);
        p += 2;
        break;
      case LayerKind::maxpool2: x = maxpool2(x); break;
      case LayerKind::relu: x = activation(x, Activation::relu); break;
      case LayerKind::flatten: {
        const std::size_t batch = x.shape()[0];
        x = reshape(x, {batch, x.value().size() / batch});
        break;
      }
      case LayerKind::dense:
        x = add_row_bias(matmul(x, params[p]), params[p + 1]);
        p += 2;
        break;
    }
  }
  return x;
}

Var Model::forward(Var input) const {
  const auto params = bind(*input.graph, false);
  return forward(input, params);
}

Tensor Model::logits(const Tensor& input, std::size_t chunk) const {
  if (input.rank() == 0) throw DimensionError("Model::logits: empty input");
  const std::size_t n = input.dim(0);
  Tensor out({n, arch_.classes});
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    Graph graph;
    const Tensor part = forward(graph.constant(input.slice_rows(begin, end))).value();
    std::copy(part.values().begin(), part.values().end(), out.data() + begin * arch_.classes);
  }
  return out;
}

std::vector<int> Model::predict(const Tensor& input, std::size_t chunk) const {
  return argmax_rows(logits(input, chunk));
}

Model build_model(const Architecture& arch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Tensor> params;
  for (const Shape& shape : parameter_shapes(arch)) {
    Tensor t(shape);
    if (shape.size() > 1) {
      // fan_in: cin*r*r for conv kernels, rows for dense weights
      const std::size_t fan_in = shape.size() == 4 ? shape[1] * shape[2] * shape[3] : shape[0];
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : t.values()) v = dist(rng);
    }
    params.push_back(std::move(t));
  }
  return Model(arch, std::move(params));
}

}  // namespace blindguard
