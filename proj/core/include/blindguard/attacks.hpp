#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "blindguard/blind.hpp"
#include "blindguard/model.hpp"
#include "blindguard/preprocessing.hpp"

namespace blindguard {

enum class ThreatMode { full_white_box, blind, bpda };
std::string_view to_string(ThreatMode mode);
ThreatMode threat_mode_from_string(std::string_view name);

/// How LS-PGA moves the bucket logits: by the raw gradient or by its sign.
enum class AscentRule { gradient, sign };
std::string_view to_string(AscentRule rule);
AscentRule ascent_rule_from_string(std::string_view name);

struct AttackConfig {
  double epsilon = 0.3;
  int steps = 7;
  double step_size = 1.0;  // xi: logit step for LS-PGA, pixel step for PGD
  double anneal = 1.2;     // delta > 1
  double initial_temperature = 1.0;
  int restarts = 1;
  ThreatMode mode = ThreatMode::full_white_box;
  std::uint64_t seed = 0;
  int levels = 15;
  AscentRule ascent = AscentRule::sign;
  /// Multiply T by delta each step instead of dividing (literal reading).
  bool heat = false;
  /// PGD starts uniformly inside the eps-ball; off means it starts at x.
  bool random_start = true;
  /// BPDA pixel step; 0 selects 2.5 * epsilon / steps.
  double pixel_step_size = 0.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Allowed buckets per pixel. Pixel p (row-major over `shape`) may use bucket b
/// iff allowed[p * levels + b] != 0.
struct Mask {
  Shape shape;
  int levels = 0;
  std::vector<std::uint8_t> allowed;

  std::size_t pixels() const noexcept { return element_count(shape); }
  bool at(std::size_t pixel, int bucket) const { return allowed[pixel * levels + bucket] != 0; }
};

/// Bucket b is allowed iff [b/k, (b+1)/k) meets [max(0, x - eps), min(1, x + eps)].
Mask compute_mask(const Tensor& batch, double epsilon, int levels);
/// Same rule, with interval end points lo/hi given per pixel (both in [0, 1]) and
/// the clean bucket taken from `center`.
Mask mask_from_bounds(const Tensor& lo, const Tensor& hi, const Tensor& center, int levels);

/// What the model sees as a function of the chosen buckets.
enum class Tail {
  thermometer,  // k-channel thermometer code
  one_hot,      // k-channel one-hot code
  pixels,       // a pixel value per bucket (undefended model on raw input)
};

/// Where the adversarial example is handed to the defender.
enum class Delivery {
  encoded,  // straight into the model (white-box on the encoded representation)
  raw,      // as a raw image, pre-processed by the defender like any other input
};

struct AdversarialBatch {
  Buckets buckets;         // chosen bucket per pixel
  EncodedBatch encoded;    // model input the attacker optimised
  Tensor realized;         // raw image inside the eps-ball (empty for encoded delivery)
  std::vector<int> labels;
  std::vector<double> loss;            // per example, as seen by the attacker
  std::vector<std::uint8_t> success;   // attacker-side misclassification
  Delivery delivery = Delivery::encoded;
  std::vector<double> temperature_trace;   // T used at each step (first restart)
  std::vector<double> relaxed_loss_trace;  // mean relaxed loss at each step (first restart)

  double success_rate() const;
};

/// Loss gradient with respect to the attacked input.
using InputGradient = std::function<Tensor(const Tensor& x, std::span<const int> labels)>;

/// Gradient of the summed cross-entropy of model(prefix(x)) with respect to x.
/// Raises UnsupportedError when no input gradient exists: BLIND or BPDA mode
/// with a pipeline, or a pipeline containing a non-differentiable stage.
InputGradient model_input_gradient(const Model& model, const Pipeline* pipeline, ThreatMode mode);

/// x' = clamp(x + eps * sign(grad), 0, 1).
Tensor fgsm(const InputGradient& gradient, const Tensor& x, std::span<const int> labels, double epsilon);
Tensor fgsm(const Model& model, const Pipeline* pipeline, const Tensor& x, std::span<const int> labels,
            double epsilon, ThreatMode mode = ThreatMode::full_white_box);

/// Iterated signed steps of size cfg.step_size, projected onto the eps-ball
/// intersected with [0, 1]. `on_step` (optional) sees every iterate.
Tensor pgd_continuous(const InputGradient& gradient, const Tensor& x, std::span<const int> labels,
                      const AttackConfig& cfg, const std::function<void(const Tensor&)>& on_step = {});
Tensor pgd_continuous(const Model& model, const Pipeline* pipeline, const Tensor& x, std::span<const int> labels,
                      const AttackConfig& cfg);

/// Everything one LS-PGA restart needs: the mask, the tail mapping buckets to
/// model input, and for the pixels tail the per-bucket pixel values.
struct LspgaProblem {
  const Model* model = nullptr;
  Mask mask;
  Tail tail = Tail::thermometer;
  /// Tail::pixels only: [batch x c x levels x h x w], the value pixel (c, h, w)
  /// takes when bucket b is chosen.
  Tensor pixel_values;
  /// Differentiable stages applied between the tail and the model (pixels tail only).
  const Pipeline* prefix = nullptr;
  std::vector<int> labels;
};

/// One LS-PGA run with cfg.seed (cfg.restarts ignored).
AdversarialBatch lspga_once(const LspgaProblem& problem, const AttackConfig& cfg);

/// Per-example best of cfg.restarts runs under (success, then loss) ordering,
/// ties keeping the earlier restart. Restart i runs with seed cfg.seed + i.
AdversarialBatch multi_restart(const std::function<AdversarialBatch(const AttackConfig&)>& attack,
                               const AttackConfig& cfg);

/// Full white-box LS-PGA. With an encoding pipeline the mask is taken through
/// the pipeline prefix (batch statistics of the clean batch) and the crafted
/// encoding is delivered to the model directly; without a pipeline the
/// attack works on raw pixels and delivers the realized image.
AdversarialBatch lspga(const Model& model, const Pipeline* pipeline, const Tensor& batch,
                       std::span<const int> labels, const AttackConfig& cfg);

/// Blind LS-PGA: the attacker only knows the encoding format, so buckets are
/// taken in raw-pixel space, optimised through the model's encoded input, and
/// delivered as a raw image for the defender's gate.
AdversarialBatch lspga(const AttackerView& view, const Tensor& batch, std::span<const int> labels,
                       const AttackConfig& cfg);

/// BPDA: PGD on raw pixels through surrogate -> hard encoding -> model, with
/// the straight-through gradient of a soft thermometer in the backward pass.
/// The surrogate is the identity unless `oracle_prefix` supplies the true
/// (differentiable) pipeline prefix, which only tests may do.
AdversarialBatch bpda_attack(const AttackerView& view, const Tensor& batch, std::span<const int> labels,
                             const AttackConfig& cfg, const Pipeline* oracle_prefix = nullptr);
AdversarialBatch bpda_attack(const Model& model, const EncodingFormat& format, const Tensor& batch,
                             std::span<const int> labels, const AttackConfig& cfg,
                             const Pipeline* oracle_prefix = nullptr);

/// Pixel value the realized image uses for bucket b of a pixel at x: x itself
/// for the clean bucket, else the bucket centre clamped into [lo, hi].
double realize_pixel(double x, double lo, double hi, int bucket, int levels);

}  // namespace blindguard
