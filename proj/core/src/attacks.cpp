#include "blindguard/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "blindguard/errors.hpp"
#include "blindguard/ops.hpp"

namespace blindguard {

namespace {

constexpr double kBlocked = -1e9;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

int bucket_of(double v, int levels) {
  v = std::clamp(v, 0.0, 1.0);
  return std::min(static_cast<int>(std::floor(v * levels)), levels - 1);
}

void require_labels(const Tensor& batch, std::span<const int> labels) {
  if (batch.rank() != 4) throw DimensionError("attack: expected [batch x c x h x w], got " + to_string(batch.shape()));
  if (batch.dim(0) != labels.size()) {
    throw DimensionError("attack: " + std::to_string(labels.size()) + " labels for batch " + to_string(batch.shape()));
  }
}

/// Layout helpers between the mask ([pixel][bucket]) and logits
/// ([n][c][bucket][h][w]).
struct Layout {
  std::size_t planes = 0;  // n * c
  std::size_t area = 0;    // h * w
  std::size_t levels = 0;

  std::size_t logit(std::size_t plane, std::size_t b, std::size_t q) const { return (plane * levels + b) * area + q; }
  std::size_t pixel(std::size_t plane, std::size_t q) const { return plane * area + q; }
};

Layout layout_of(const Mask& mask) {
  return {mask.shape[0] * mask.shape[1], mask.shape[2] * mask.shape[3], static_cast<std::size_t>(mask.levels)};
}

Shape logits_shape(const Mask& mask) {
  return {mask.shape[0], mask.shape[1], static_cast<std::size_t>(mask.levels), mask.shape[2], mask.shape[3]};
}

/// Model input for hard bucket choices.
Tensor hard_input(const LspgaProblem& problem, const Buckets& buckets) {
  switch (problem.tail) {
    case Tail::thermometer: return thermometer_encode(buckets).data;
    case Tail::one_hot: return one_hot(buckets).data;
    case Tail::pixels: {
      const Layout l = layout_of(problem.mask);
      Tensor out(problem.mask.shape);
      for (std::size_t pl = 0; pl < l.planes; ++pl)
        for (std::size_t q = 0; q < l.area; ++q) {
          const auto b = static_cast<std::size_t>(buckets.index[l.pixel(pl, q)]);
          out[l.pixel(pl, q)] = problem.pixel_values[l.logit(pl, b, q)];
        }
      return out;
    }
  }
  return {};
}

Var model_with_prefix(const Model& model, const Pipeline* prefix, Var input) {
  if (prefix != nullptr && prefix->prefix_length() > 0) input = apply_prefix(input, *prefix);
  return model.forward(input);
}

void score(const Model& model, const Pipeline* prefix, const Tensor& input, AdversarialBatch& out) {
  Graph graph;
  const Tensor logits = model_with_prefix(model, prefix, graph.constant(input)).value();
  out.loss = cross_entropy_per_example(logits, out.labels);
  const std::vector<int> predicted = argmax_rows(logits);
  out.success.resize(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) out.success[i] = predicted[i] != out.labels[i] ? 1 : 0;
}

/// Copies example `i` of `from` into `into` (same shapes).
void copy_example(const Tensor& from, Tensor& into, std::size_t i, std::size_t n) {
  if (from.empty()) return;
  const std::size_t row = from.size() / n;
  std::copy_n(from.data() + i * row, row, into.data() + i * row);
}

/// Hard thermometer / one-hot code in the forward pass, gradient of the soft
/// thermometer clamp((i + 1) - k * s, 0, 1) in the backward pass.
Var straight_through_encode(Var s, const EncodingFormat& format) {
  if (!format.encoding) return s;
  const Shape& shape = s.shape();
  if (shape.size() != 4) throw DimensionError("bpda: expected [batch x c x h x w], got " + to_string(shape));
  const int k = format.levels;
  const auto kk = static_cast<std::size_t>(k);
  const std::size_t planes = shape[0] * shape[1], area = shape[2] * shape[3];
  Buckets buckets{shape, std::vector<int>(s.value().size()), k};
  for (std::size_t i = 0; i < buckets.index.size(); ++i) buckets.index[i] = bucket_of(s.value()[i], k);
  const bool thermo = *format.encoding == TransformKind::thermometer;
  Tensor hard = thermo ? thermometer_encode(buckets).data : one_hot(buckets).data;
  return s.graph->record(std::move(hard), {s}, [s, k, kk, planes, area, thermo](Graph& g, std::span<const double> go) {
    const auto sv = g.value(s.id).values();
    auto gs = g.grad_buffer(s.id);
    std::vector<double> dt(kk + 1);
    for (std::size_t pl = 0; pl < planes; ++pl)
      for (std::size_t q = 0; q < area; ++q) {
        const double ks = k * sv[pl * area + q];
        for (std::size_t i = 0; i <= kk; ++i) {
          const double t = static_cast<double>(i + 1) - ks;
          dt[i] = (i < kk && t > 0.0 && t < 1.0) ? -k : 0.0;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < kk; ++i) {
          const double d = thermo ? dt[i] : dt[i] - dt[i + 1];
          acc += d * go[(pl * kk + i) * area + q];
        }
        gs[pl * area + q] += acc;
      }
  });
}

AdversarialBatch bpda_once(const Model& model, const EncodingFormat& format, const Tensor& x,
                           std::span<const int> labels, const AttackConfig& cfg, const Pipeline* oracle_prefix) {
  const double step = cfg.pixel_step_size > 0.0 ? cfg.pixel_step_size
                                                 : (cfg.steps > 0 ? 2.5 * cfg.epsilon / cfg.steps : 0.0);
  Tensor adv = x;
  if (cfg.steps > 0 && cfg.random_start) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-cfg.epsilon, cfg.epsilon);
    for (double& v : adv.values()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  auto forward = [&](Var input) {
    Var s = oracle_prefix != nullptr ? apply_prefix(input, *oracle_prefix) : input;
    return model.forward(straight_through_encode(s, format));
  };
  for (int j = 0; j < cfg.steps; ++j) {
    Graph graph;
    Var input = graph.leaf(adv, true);
    graph.backward(softmax_cross_entropy(forward(input), labels, Reduction::sum));
    const Tensor grad = input.grad();
    for (std::size_t i = 0; i < adv.size(); ++i) {
      const double lo = std::max(0.0, x[i] - cfg.epsilon), hi = std::min(1.0, x[i] + cfg.epsilon);
      adv[i] = std::clamp(adv[i] + step * sign(grad[i]), lo, hi);
    }
  }

  AdversarialBatch out;
  out.labels.assign(labels.begin(), labels.end());
  out.delivery = Delivery::raw;
  out.realized = adv;
  {
    Graph graph;
    Var s = oracle_prefix != nullptr ? apply_prefix(graph.constant(adv), *oracle_prefix) : graph.constant(adv);
    out.buckets = Buckets{s.shape(), std::vector<int>(s.value().size()), format.levels};
    for (std::size_t i = 0; i < out.buckets.index.size(); ++i) {
      out.buckets.index[i] = bucket_of(s.value()[i], format.levels);
    }
    Var encoded = straight_through_encode(s, format);
    out.encoded = {encoded.value(), format.encoding.has_value()};
    const Tensor logits = model.forward(encoded).value();
    out.loss = cross_entropy_per_example(logits, out.labels);
    const std::vector<int> predicted = argmax_rows(logits);
    for (std::size_t i = 0; i < predicted.size(); ++i) out.success.push_back(predicted[i] != out.labels[i] ? 1 : 0);
  }
  return out;
}

}  // namespace

std::string_view to_string(ThreatMode mode) {
  switch (mode) {
    case ThreatMode::full_white_box: return "full";
    case ThreatMode::blind: return "blind";
    case ThreatMode::bpda: return "bpda";
  }
  return "unknown";
}

ThreatMode threat_mode_from_string(std::string_view name) {
  if (name == "full") return ThreatMode::full_white_box;
  if (name == "blind") return ThreatMode::blind;
  if (name == "bpda") return ThreatMode::bpda;
  throw ConfigError("unknown threat mode '" + std::string(name) + "' (expected full, blind or bpda)");
}

std::string_view to_string(AscentRule rule) { return rule == AscentRule::gradient ? "gradient" : "sign"; }

AscentRule ascent_rule_from_string(std::string_view name) {
  if (name == "gradient") return AscentRule::gradient;
  if (name == "sign") return AscentRule::sign;
  throw ConfigError("unknown ascent rule '" + std::string(name) + "' (expected gradient or sign)");
}

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("attack: epsilon must lie in [0, 1]");
  if (steps < 0) throw ConfigError("attack: steps must be >= 0");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) throw ConfigError("attack: step_size must be >= 0");
  if (!(anneal > 1.0) || !std::isfinite(anneal)) throw ConfigError("attack: anneal must be > 1");
  if (!(initial_temperature > 0.0) || !std::isfinite(initial_temperature)) {
    throw ConfigError("attack: initial_temperature must be > 0");
  }
  if (restarts < 1) throw ConfigError("attack: restarts must be >= 1");
  if (levels < 2) throw ConfigError("attack: levels must be >= 2");
  if (!(pixel_step_size >= 0.0)) throw ConfigError("attack: pixel_step_size must be >= 0");
}

double AdversarialBatch::success_rate() const {
  if (success.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto s : success) hits += s;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(success.size());
}

Mask mask_from_bounds(const Tensor& lo, const Tensor& hi, const Tensor& center, int levels) {
  if (lo.shape() != hi.shape() || lo.shape() != center.shape()) {
    throw DimensionError("mask_from_bounds: shape mismatch");
  }
  if (levels < 2) throw ConfigError("mask: levels must be >= 2");
  Mask mask{lo.shape(), levels, std::vector<std::uint8_t>(lo.size() * static_cast<std::size_t>(levels), 0)};
  for (std::size_t p = 0; p < lo.size(); ++p) {
    const int first = bucket_of(lo[p], levels);
    const int last = bucket_of(hi[p], levels);
    for (int b = first; b <= last; ++b) mask.allowed[p * levels + b] = 1;
    mask.allowed[p * levels + bucket_of(center[p], levels)] = 1;
  }
  return mask;
}

Mask compute_mask(const Tensor& batch, double epsilon, int levels) {
  if (!(epsilon >= 0.0)) throw RangeError("compute_mask: epsilon must be >= 0, got " + std::to_string(epsilon));
  Tensor lo = batch, hi = batch;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!(batch[i] >= 0.0 && batch[i] <= 1.0)) {
      throw RangeError("compute_mask: pixel " + std::to_string(batch[i]) + " outside [0, 1]");
    }
    lo[i] = std::max(0.0, batch[i] - epsilon);
    hi[i] = std::min(1.0, batch[i] + epsilon);
  }
  return mask_from_bounds(lo, hi, batch, levels);
}

double realize_pixel(double x, double lo, double hi, int bucket, int levels) {
  if (bucket == bucket_of(x, levels)) return x;
  return std::clamp((bucket + 0.5) / levels, lo, hi);
}

InputGradient model_input_gradient(const Model& model, const Pipeline* pipeline, ThreatMode mode) {
  const bool has_pipeline = pipeline != nullptr && !pipeline->empty();
  if (has_pipeline) {
    if (mode != ThreatMode::full_white_box) {
      throw UnsupportedError("no input gradient exists across the blind pre-processing boundary");
    }
    pipeline->validate();
    if (pipeline->prefix_length() != pipeline->transforms.size()) {
      throw UnsupportedError("pipeline " + pipeline->describe() + " is not differentiable");
    }
  }
  return [&model, pipeline, has_pipeline](const Tensor& x, std::span<const int> labels) {
    Graph graph;
    Var input = graph.leaf(x, true);
    Var z = has_pipeline ? apply_prefix(input, *pipeline) : input;
    graph.backward(softmax_cross_entropy(model.forward(z), labels, Reduction::sum));
    return input.grad();
  };
}

Tensor fgsm(const InputGradient& gradient, const Tensor& x, std::span<const int> labels, double epsilon) {
  const Tensor grad = gradient(x, labels);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(x[i] + epsilon * sign(grad[i]), 0.0, 1.0);
  return out;
}

Tensor fgsm(const Model& model, const Pipeline* pipeline, const Tensor& x, std::span<const int> labels,
            double epsilon, ThreatMode mode) {
  require_labels(x, labels);
  return fgsm(model_input_gradient(model, pipeline, mode), x, labels, epsilon);
}

Tensor pgd_continuous(const InputGradient& gradient, const Tensor& x, std::span<const int> labels,
                      const AttackConfig& cfg, const std::function<void(const Tensor&)>& on_step) {
  cfg.validate();
  Tensor lo = x, hi = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo[i] = std::max(0.0, x[i] - cfg.epsilon);
    hi[i] = std::min(1.0, x[i] + cfg.epsilon);
  }
  Tensor adv = x;
  if (cfg.random_start) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-cfg.epsilon, cfg.epsilon);
    for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = std::clamp(x[i] + noise(rng), lo[i], hi[i]);
  }
  for (int j = 0; j < cfg.steps; ++j) {
    const Tensor grad = gradient(adv, labels);
    for (std::size_t i = 0; i < adv.size(); ++i) {
      adv[i] = std::clamp(adv[i] + cfg.step_size * sign(grad[i]), lo[i], hi[i]);
    }
    if (on_step) on_step(adv);
  }
  return adv;
}

Tensor pgd_continuous(const Model& model, const Pipeline* pipeline, const Tensor& x, std::span<const int> labels,
                      const AttackConfig& cfg) {
  require_labels(x, labels);
  return pgd_continuous(model_input_gradient(model, pipeline, cfg.mode), x, labels, cfg);
}

AdversarialBatch lspga_once(const LspgaProblem& problem, const AttackConfig& cfg) {
  cfg.validate();
  const Mask& mask = problem.mask;
  if (mask.shape.size() != 4) throw DimensionError("lspga: mask must cover [batch x c x h x w]");
  if (mask.shape[0] != problem.labels.size()) throw DimensionError("lspga: label count does not match the mask");
  if (problem.tail == Tail::pixels && problem.pixel_values.shape() != logits_shape(mask)) {
    throw DimensionError("lspga: pixel_values must be " + to_string(logits_shape(mask)));
  }
  const Model& model = *problem.model;
  const Layout l = layout_of(mask);
  const Shape shape = logits_shape(mask);
  const std::size_t n = mask.shape[0];

  Tensor u(shape);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t pl = 0; pl < l.planes; ++pl)
    for (std::size_t b = 0; b < l.levels; ++b)
      for (std::size_t q = 0; q < l.area; ++q) {
        u[l.logit(pl, b, q)] = mask.at(l.pixel(pl, q), static_cast<int>(b)) ? normal(rng) : kBlocked;
      }

  AdversarialBatch out;
  out.labels = problem.labels;
  double temperature = cfg.initial_temperature;
  for (int j = 0; j < cfg.steps; ++j) {
    Graph graph;
    Var logits_var = graph.leaf(u, true);
    Var soft = softmax(affine(logits_var, 1.0 / temperature), 2);
    Var z;
    switch (problem.tail) {
      case Tail::thermometer:
        z = reshape(relaxed_thermometer(soft, 2), {n, mask.shape[1] * l.levels, mask.shape[2], mask.shape[3]});
        break;
      case Tail::one_hot:
        z = reshape(soft, {n, mask.shape[1] * l.levels, mask.shape[2], mask.shape[3]});
        break;
      case Tail::pixels: {
        const std::vector<double> ones(l.levels, 1.0);
        z = contract_axis(mul(soft, graph.constant(problem.pixel_values)), 2, ones);
        break;
      }
    }
    Var loss = softmax_cross_entropy(model_with_prefix(model, problem.prefix, z), problem.labels, Reduction::sum);
    graph.backward(loss);
    out.temperature_trace.push_back(temperature);
    out.relaxed_loss_trace.push_back(loss.value().item() / static_cast<double>(n));

    const Tensor grad = logits_var.grad();
    for (std::size_t pl = 0; pl < l.planes; ++pl)
      for (std::size_t b = 0; b < l.levels; ++b)
        for (std::size_t q = 0; q < l.area; ++q) {
          if (!mask.at(l.pixel(pl, q), static_cast<int>(b))) continue;
          const std::size_t i = l.logit(pl, b, q);
          u[i] += cfg.step_size * (cfg.ascent == AscentRule::sign ? sign(grad[i]) : grad[i]);
        }
    temperature = cfg.heat ? temperature * cfg.anneal : temperature / cfg.anneal;
  }

  out.buckets = Buckets{mask.shape, std::vector<int>(mask.pixels()), mask.levels};
  for (std::size_t pl = 0; pl < l.planes; ++pl)
    for (std::size_t q = 0; q < l.area; ++q) {
      int best = -1;
      for (std::size_t b = 0; b < l.levels; ++b) {
        if (!mask.at(l.pixel(pl, q), static_cast<int>(b))) continue;
        if (best < 0 || u[l.logit(pl, b, q)] > u[l.logit(pl, static_cast<std::size_t>(best), q)]) {
          best = static_cast<int>(b);
        }
      }
      out.buckets.index[l.pixel(pl, q)] = best;
    }
  out.encoded = {hard_input(problem, out.buckets), problem.tail != Tail::pixels};
  score(model, problem.prefix, out.encoded.data, out);
  return out;
}

AdversarialBatch multi_restart(const std::function<AdversarialBatch(const AttackConfig&)>& attack,
                               const AttackConfig& cfg) {
  if (cfg.restarts < 1) throw ConfigError("multi_restart: restarts must be >= 1");
  AttackConfig run = cfg;
  AdversarialBatch best = attack(run);
  const std::size_t n = best.labels.size();
  for (int r = 1; r < cfg.restarts; ++r) {
    run.seed = cfg.seed + static_cast<std::uint64_t>(r);
    const AdversarialBatch next = attack(run);
    const std::size_t per_pixel = n == 0 ? 0 : best.buckets.index.size() / n;
    for (std::size_t i = 0; i < n; ++i) {
      const bool better = next.success[i] > best.success[i] ||
                          (next.success[i] == best.success[i] && next.loss[i] > best.loss[i]);
      if (!better) continue;
      std::copy_n(next.buckets.index.begin() + static_cast<std::ptrdiff_t>(i * per_pixel), per_pixel,
                  best.buckets.index.begin() + static_cast<std::ptrdiff_t>(i * per_pixel));
      copy_example(next.encoded.data, best.encoded.data, i, n);
      copy_example(next.realized, best.realized, i, n);
      best.loss[i] = next.loss[i];
      best.success[i] = next.success[i];
    }
  }
  return best;
}

AdversarialBatch lspga(const Model& model, const Pipeline* pipeline, const Tensor& batch,
                       std::span<const int> labels, const AttackConfig& cfg) {
  cfg.validate();
  require_labels(batch, labels);
  LspgaProblem problem;
  problem.model = &model;
  problem.labels.assign(labels.begin(), labels.end());

  Tensor lo = batch, hi = batch;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    lo[i] = std::max(0.0, batch[i] - cfg.epsilon);
    hi[i] = std::min(1.0, batch[i] + cfg.epsilon);
  }

  if (pipeline != nullptr && pipeline->quantizes()) {
    // Work in the quantized representation after the prefix. The prefix stages
    // are monotone, so the images at the corners of the eps-box bound every
    // reachable pre-quantization value.
    pipeline->validate();
    PrefixTrace trace;
    const Tensor center = apply_prefix(*pipeline, batch, &trace);
    problem.mask = mask_from_bounds(apply_prefix(*pipeline, lo, nullptr, &trace),
                                    apply_prefix(*pipeline, hi, nullptr, &trace), center, pipeline->levels);
    const auto encoding = pipeline->encoding();
    if (encoding) {
      problem.tail = *encoding == TransformKind::thermometer ? Tail::thermometer : Tail::one_hot;
    } else {
      problem.tail = Tail::pixels;
      const Layout l = layout_of(problem.mask);
      problem.pixel_values = Tensor(logits_shape(problem.mask));
      for (std::size_t pl = 0; pl < l.planes; ++pl)
        for (std::size_t b = 0; b < l.levels; ++b)
          for (std::size_t q = 0; q < l.area; ++q) {
            problem.pixel_values[l.logit(pl, b, q)] = (static_cast<double>(b) + 0.5) / pipeline->levels;
          }
    }
    return multi_restart([&](const AttackConfig& c) { return lspga_once(problem, c); }, cfg);
  }

  if (pipeline != nullptr && pipeline->prefix_length() > 0) {
    pipeline->validate();
    problem.prefix = pipeline;
  }
  problem.mask = compute_mask(batch, cfg.epsilon, cfg.levels);
  problem.tail = Tail::pixels;
  const Layout l = layout_of(problem.mask);
  problem.pixel_values = Tensor(logits_shape(problem.mask));
  for (std::size_t pl = 0; pl < l.planes; ++pl)
    for (std::size_t b = 0; b < l.levels; ++b)
      for (std::size_t q = 0; q < l.area; ++q) {
        const std::size_t p = l.pixel(pl, q);
        problem.pixel_values[l.logit(pl, b, q)] = realize_pixel(batch[p], lo[p], hi[p], static_cast<int>(b), cfg.levels);
      }
  AdversarialBatch out = multi_restart([&](const AttackConfig& c) { return lspga_once(problem, c); }, cfg);
  out.realized = out.encoded.data;
  out.delivery = Delivery::raw;
  return out;
}

AdversarialBatch lspga(const AttackerView& view, const Tensor& batch, std::span<const int> labels,
                       const AttackConfig& cfg) {
  cfg.validate();
  require_labels(batch, labels);
  const EncodingFormat& format = view.encoding_format();
  const int k = format.encoding ? format.levels : cfg.levels;

  LspgaProblem problem;
  problem.model = &view.model();
  problem.labels.assign(labels.begin(), labels.end());
  problem.mask = compute_mask(batch, cfg.epsilon, k);

  const Layout l = layout_of(problem.mask);
  Tensor values(logits_shape(problem.mask));
  for (std::size_t pl = 0; pl < l.planes; ++pl)
    for (std::size_t b = 0; b < l.levels; ++b)
      for (std::size_t q = 0; q < l.area; ++q) {
        const std::size_t p = l.pixel(pl, q);
        const double lo = std::max(0.0, batch[p] - cfg.epsilon), hi = std::min(1.0, batch[p] + cfg.epsilon);
        values[l.logit(pl, b, q)] = realize_pixel(batch[p], lo, hi, static_cast<int>(b), k);
      }

  if (format.encoding) {
    problem.tail = *format.encoding == TransformKind::thermometer ? Tail::thermometer : Tail::one_hot;
  } else {
    problem.tail = Tail::pixels;
    problem.pixel_values = values;
  }
  AdversarialBatch out = multi_restart([&](const AttackConfig& c) { return lspga_once(problem, c); }, cfg);

  out.realized = Tensor(batch.shape());
  for (std::size_t pl = 0; pl < l.planes; ++pl)
    for (std::size_t q = 0; q < l.area; ++q) {
      const auto b = static_cast<std::size_t>(out.buckets.index[l.pixel(pl, q)]);
      out.realized[l.pixel(pl, q)] = values[l.logit(pl, b, q)];
    }
  out.delivery = Delivery::raw;
  return out;
}

AdversarialBatch bpda_attack(const Model& model, const EncodingFormat& format, const Tensor& batch,
                             std::span<const int> labels, const AttackConfig& cfg, const Pipeline* oracle_prefix) {
  cfg.validate();
  require_labels(batch, labels);
  if (oracle_prefix != nullptr) {
    oracle_prefix->validate();
    if (oracle_prefix->prefix_length() == 0 && !oracle_prefix->empty()) oracle_prefix = nullptr;
  }
  return multi_restart([&](const AttackConfig& c) { return bpda_once(model, format, batch, labels, c, oracle_prefix); },
                       cfg);
}

AdversarialBatch bpda_attack(const AttackerView& view, const Tensor& batch, std::span<const int> labels,
                             const AttackConfig& cfg, const Pipeline* oracle_prefix) {
  return bpda_attack(view.model(), view.encoding_format(), batch, labels, cfg, oracle_prefix);
}

}  // namespace blindguard
