#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blindguard/autodiff.hpp"
#include "blindguard/ops.hpp"

namespace blindguard {

enum class LayerKind { conv, maxpool2, relu, flatten, dense };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::size_t kernel = 0;  // conv only, odd
  std::size_t units = 0;   // conv output channels or dense outputs

  static LayerSpec conv(std::size_t kernel, std::size_t channels) { return {LayerKind::conv, kernel, channels}; }
  static LayerSpec dense(std::size_t units) { return {LayerKind::dense, 0, units}; }
  static LayerSpec maxpool2() { return {LayerKind::maxpool2, 0, 0}; }
  static LayerSpec relu() { return {LayerKind::relu, 0, 0}; }
  static LayerSpec flatten() { return {LayerKind::flatten, 0, 0}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
  std::vector<LayerSpec> layers;
  std::size_t in_channels = 1;
  std::size_t height = 28;
  std::size_t width = 28;
  std::size_t classes = 10;
  Padding padding = Padding::same;

  /// conv(5,32) relu pool conv(5,64) relu pool flatten dense(128) relu dense(10).
  static Architecture mnist(std::size_t in_channels = 1);
  /// conv(3,32) relu pool conv(3,64) relu pool flatten dense(128) relu dense(10) on 32x32.
  static Architecture cifar_small(std::size_t in_channels = 3);

  /// Shape of every layer output for a single example, starting with the input.
  /// Throws ConfigError naming the first layer whose input shape does not fit.
  std::vector<Shape> infer_shapes() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// A feed-forward classifier: parameters plus the architecture that uses them.
/// Parameters are laid out in layer order; conv contributes [cout x cin x r x r]
/// then [cout], dense contributes [in x out] then [out].
class Model {
 public:
  Model() = default;
  Model(Architecture arch, std::vector<Tensor> parameters);

  const Architecture& architecture() const noexcept { return arch_; }
  const std::vector<Tensor>& parameters() const noexcept { return params_; }
  std::vector<Tensor>& parameters() noexcept { return params_; }
  std::size_t parameter_count() const;

  /// Places the parameters on `graph`; tracked when gradients are needed.
  std::vector<Var> bind(Graph& graph, bool track) const;
  /// Logits [batch x classes] for `input` [batch x cin x h x w].
  Var forward(Var input, std::span<const Var> params) const;
  Var forward(Var input) const;

  /// Graph-free inference in chunks of `chunk` examples.
  Tensor logits(const Tensor& input, std::size_t chunk = 256) const;
  std::vector<int> predict(const Tensor& input, std::size_t chunk = 256) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Architecture arch_;
  std::vector<Tensor> params_;
};

/// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases.
Model build_model(const Architecture& arch, std::uint64_t seed);

}  // namespace blindguard
