#include "blindguard/preprocessing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "blindguard/errors.hpp"
#include "blindguard/ops.hpp"

namespace blindguard {

namespace {

std::atomic<std::uint64_t> g_invocations{0};

void count_stage() { g_invocations.fetch_add(1, std::memory_order_relaxed); }

struct NamedKind {
  TransformKind kind;
  std::string_view name;
};

constexpr NamedKind kKindNames[] = {
    {TransformKind::tanh_filter, "tanh_filter"}, {TransformKind::sigmoid_filter, "sigmoid_filter"},
    {TransformKind::batch_norm, "batch_norm"},   {TransformKind::max_smooth, "max_smooth"},
    {TransformKind::avg_smooth, "avg_smooth"},   {TransformKind::quantize, "quantize"},
    {TransformKind::one_hot, "one_hot"},         {TransformKind::thermometer, "thermometer"},
};

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void require_rank4(const char* op, const Shape& shape) {
  if (shape.size() != 4) {
    throw DimensionError(std::string(op) + ": expected [batch x c x h x w], got " + to_string(shape));
  }
}

void check_levels(int levels) {
  if (levels < 2) throw ConfigError("quantization levels must be >= 2, got " + std::to_string(levels));
}

Buckets quantize_unchecked(const Tensor& batch, int levels, bool saturate) {
  Buckets out{batch.shape(), std::vector<int>(batch.size()), levels};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double x = batch[i];
    if (saturate) {
      x = std::clamp(x, 0.0, 1.0);
    } else if (!(x >= 0.0 && x <= 1.0)) {
      throw RangeError("quantize: value " + std::to_string(x) + " at index " + std::to_string(i) +
                       " outside [0, 1]");
    }
    out.index[i] = std::min(static_cast<int>(std::floor(x * levels)), levels - 1);
  }
  return out;
}

void check_buckets(const Buckets& b) {
  check_levels(b.levels);
  require_rank4("encoding", b.shape);
  for (std::size_t i = 0; i < b.index.size(); ++i) {
    if (b.index[i] < 0 || b.index[i] >= b.levels) {
      throw IndexError("bucket " + std::to_string(b.index[i]) + " at index " + std::to_string(i) +
                       " outside [0, " + std::to_string(b.levels) + ")");
    }
  }
}

template <typename Fill>
EncodedBatch expand_channels(const Buckets& b, Fill fill) {
  check_buckets(b);
  const std::size_t n = b.shape[0], c = b.shape[1], plane = b.shape[2] * b.shape[3];
  const auto k = static_cast<std::size_t>(b.levels);
  Tensor out({n, c * k, b.shape[2], b.shape[3]});
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < plane; ++p) {
        const int bucket = b.index[(s * c + ch) * plane + p];
        for (std::size_t i = 0; i < k; ++i) {
          out[((s * c + ch) * k + i) * plane + p] = fill(static_cast<int>(i), bucket) ? 1.0 : 0.0;
        }
      }
  return {std::move(out), true};
}

struct AxisSplit {
  std::size_t outer = 1, length = 1, inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " + to_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.length = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Tensor prefix_stage(const Transform& t, const Tensor& x, PrefixTrace* record, const PrefixTrace* frozen,
                    std::size_t& bn_index) {
  switch (t.kind) {
    case TransformKind::tanh_filter: return tanh_filter(x, t.scale);
    case TransformKind::sigmoid_filter: return sigmoid_filter(x, t.scale);
    case TransformKind::batch_norm: {
      BatchStats stats;
      if (frozen != nullptr) {
        if (bn_index >= frozen->bn_stats.size()) {
          throw ContractError("apply_prefix: frozen trace has no statistics for batch_norm stage " +
                              std::to_string(bn_index));
        }
        stats = frozen->bn_stats[bn_index];
      } else {
        stats = batch_statistics(x);
      }
      ++bn_index;
      if (record != nullptr) record->bn_stats.push_back(stats);
      return batch_normalize(x, t.bn_eps, stats);
    }
    case TransformKind::max_smooth: return smooth(x, SmoothKind::max, t.window);
    case TransformKind::avg_smooth: return smooth(x, SmoothKind::avg, t.window);
    default: throw ContractError("prefix_stage: " + std::string(to_string(t.kind)) + " is not a prefix stage");
  }
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  for (const auto& entry : kKindNames)
    if (entry.kind == kind) return entry.name;
  return "unknown";
}

TransformKind transform_kind_from_string(std::string_view name) {
  for (const auto& entry : kKindNames)
    if (entry.name == name) return entry.kind;
  throw ConfigError("unknown transform kind '" + std::string(name) + "'");
}

Transform Transform::tanh_filter(double scale) { return {.kind = TransformKind::tanh_filter, .scale = scale}; }
Transform Transform::sigmoid_filter(double scale) {
  return {.kind = TransformKind::sigmoid_filter, .scale = scale};
}
Transform Transform::batch_norm(double eps) { return {.kind = TransformKind::batch_norm, .bn_eps = eps}; }
Transform Transform::max_smooth(int window) { return {.kind = TransformKind::max_smooth, .window = window}; }
Transform Transform::avg_smooth(int window) { return {.kind = TransformKind::avg_smooth, .window = window}; }
Transform Transform::quantize(int levels) { return {.kind = TransformKind::quantize, .levels = levels}; }
Transform Transform::one_hot(int levels) { return {.kind = TransformKind::one_hot, .levels = levels}; }
Transform Transform::thermometer(int levels) { return {.kind = TransformKind::thermometer, .levels = levels}; }

void Transform::validate() const {
  switch (kind) {
    case TransformKind::tanh_filter:
    case TransformKind::sigmoid_filter:
      if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError(std::string(to_string(kind)) + ": scale must be positive, got " + std::to_string(scale));
      }
      break;
    case TransformKind::batch_norm:
      if (!(bn_eps > 0.0) || !std::isfinite(bn_eps)) {
        throw ConfigError("batch_norm: eps must be positive, got " + std::to_string(bn_eps));
      }
      break;
    case TransformKind::max_smooth:
    case TransformKind::avg_smooth:
      if (window < 3 || window % 2 == 0) {
        throw ConfigError(std::string(to_string(kind)) + ": window must be odd and >= 3, got " +
                          std::to_string(window));
      }
      break;
    case TransformKind::quantize:
    case TransformKind::one_hot:
    case TransformKind::thermometer:
      if (levels < 2) {
        throw ConfigError(std::string(to_string(kind)) + ": levels must be >= 2, got " + std::to_string(levels));
      }
      break;
  }
}

Pipeline Pipeline::canonical(bool max_smoothing, int levels) {
  Pipeline p;
  p.levels = levels;
  p.transforms.push_back(Transform::tanh_filter());
  if (max_smoothing) p.transforms.push_back(Transform::max_smooth());
  p.transforms.push_back(Transform::batch_norm());
  p.transforms.push_back(Transform::quantize(levels));
  p.transforms.push_back(Transform::thermometer(levels));
  return p;
}

void Pipeline::validate() const {
  check_levels(levels);
  bool seen_quantize = false;
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const Transform& t = transforms[i];
    t.validate();
    const std::string where = "pipeline stage " + std::to_string(i) + " (" + std::string(to_string(t.kind)) + ")";
    if (t.kind == TransformKind::quantize) {
      if (seen_quantize) throw ConfigError(where + ": more than one quantize stage");
      seen_quantize = true;
    } else if (t.is_encoding()) {
      if (!seen_quantize || transforms[i - 1].kind != TransformKind::quantize) {
        throw ConfigError(where + ": an encoding must directly follow quantize");
      }
      if (i + 1 != transforms.size()) throw ConfigError(where + ": an encoding must be the last stage");
    } else if (seen_quantize) {
      throw ConfigError(where + ": only an encoding may follow quantize");
    }
    if ((t.kind == TransformKind::quantize || t.is_encoding()) && t.levels != levels) {
      throw ConfigError(where + ": levels " + std::to_string(t.levels) + " differ from pipeline levels " +
                        std::to_string(levels));
    }
  }
}

bool Pipeline::quantizes() const {
  return std::any_of(transforms.begin(), transforms.end(),
                     [](const Transform& t) { return t.kind == TransformKind::quantize; });
}

std::optional<TransformKind> Pipeline::encoding() const {
  if (!transforms.empty() && transforms.back().is_encoding()) return transforms.back().kind;
  return std::nullopt;
}

std::size_t Pipeline::prefix_length() const {
  for (std::size_t i = 0; i < transforms.size(); ++i)
    if (transforms[i].kind == TransformKind::quantize) return i;
  return transforms.size();
}

std::size_t Pipeline::output_channels(std::size_t input_channels) const {
  return encoding() ? input_channels * static_cast<std::size_t>(levels) : input_channels;
}

std::string Pipeline::describe() const {
  if (transforms.empty()) return "identity";
  std::string out;
  for (const Transform& t : transforms) {
    if (!out.empty()) out += " -> ";
    out += to_string(t.kind);
  }
  return out + " (k=" + std::to_string(levels) + ")";
}

Tensor tanh_filter(const Tensor& batch, double scale) {
  const double edge = std::tanh(scale * 0.5);
  Tensor out = batch;
  for (double& v : out.values()) v = (std::tanh(scale * (v - 0.5)) + edge) / (2.0 * edge);
  return out;
}

Tensor sigmoid_filter(const Tensor& batch, double scale) {
  const double lo = sigmoid(-scale * 0.5);
  const double hi = sigmoid(scale * 0.5);
  Tensor out = batch;
  for (double& v : out.values()) v = (sigmoid(scale * (v - 0.5)) - lo) / (hi - lo);
  return out;
}

BatchStats batch_statistics(const Tensor& batch) {
  if (batch.empty()) throw DimensionError("batch_statistics: empty batch");
  const auto n = static_cast<double>(batch.size());
  double mean = 0.0;
  for (double v : batch.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : batch.values()) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

Tensor batch_normalize(const Tensor& batch, double eps) {
  return batch_normalize(batch, eps, batch_statistics(batch));
}

Tensor batch_normalize(const Tensor& batch, double eps, const BatchStats& stats) {
  const double denom = stats.stddev + eps;
  Tensor out = batch;
  for (double& v : out.values()) v = (v - stats.mean) / denom;
  return out;
}

Tensor smooth(const Tensor& batch, SmoothKind kind, int window) {
  require_rank4("smooth", batch.shape());
  if (window < 1 || window % 2 == 0) throw ContractError("smooth: window must be odd, got " + std::to_string(window));
  const std::size_t planes = batch.dim(0) * batch.dim(1), h = batch.dim(2), w = batch.dim(3);
  const auto r = static_cast<std::ptrdiff_t>(window / 2);
  const auto hi_y = static_cast<std::ptrdiff_t>(h) - 1, hi_x = static_cast<std::ptrdiff_t>(w) - 1;
  Tensor out(batch.shape());
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = batch.data() + p * h * w;
    double* dst = out.data() + p * h * w;
    for (std::ptrdiff_t y = 0; y <= hi_y; ++y)
      for (std::ptrdiff_t x = 0; x <= hi_x; ++x) {
        double acc = kind == SmoothKind::max ? src[y * static_cast<std::ptrdiff_t>(w) + x] : 0.0;
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            const std::ptrdiff_t yy = std::clamp(y + dy, std::ptrdiff_t{0}, hi_y);
            const std::ptrdiff_t xx = std::clamp(x + dx, std::ptrdiff_t{0}, hi_x);
            const double v = src[yy * static_cast<std::ptrdiff_t>(w) + xx];
            if (kind == SmoothKind::max) {
              acc = std::max(acc, v);
            } else {
              acc += v;
            }
          }
        if (kind == SmoothKind::avg) acc /= static_cast<double>(window * window);
        dst[y * static_cast<std::ptrdiff_t>(w) + x] = acc;
      }
  }
  return out;
}

Buckets quantize(const Tensor& batch, int levels) {
  check_levels(levels);
  return quantize_unchecked(batch, levels, false);
}

Tensor decode(const Buckets& buckets) {
  check_levels(buckets.levels);
  Tensor out(buckets.shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (buckets.index[i] + 0.5) / buckets.levels;
  }
  return out;
}

EncodedBatch one_hot(const Buckets& buckets) {
  return expand_channels(buckets, [](int i, int b) { return i == b; });
}

EncodedBatch thermometer_encode(const Buckets& buckets) {
  return expand_channels(buckets, [](int i, int b) { return i >= b; });
}

Buckets thermometer_decode(const Tensor& encoded, int levels) {
  check_levels(levels);
  require_rank4("thermometer_decode", encoded.shape());
  const auto k = static_cast<std::size_t>(levels);
  if (encoded.dim(1) % k != 0) {
    throw DimensionError("thermometer_decode: channel count of " + to_string(encoded.shape()) +
                         " is not a multiple of " + std::to_string(levels));
  }
  const std::size_t n = encoded.dim(0), c = encoded.dim(1) / k, plane = encoded.dim(2) * encoded.dim(3);
  Buckets out{{n, c, encoded.dim(2), encoded.dim(3)}, std::vector<int>(n * c * plane), levels};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < plane; ++p) {
        int ones = 0;
        for (std::size_t i = 0; i < k; ++i) ones += encoded[((s * c + ch) * k + i) * plane + p] > 0.5 ? 1 : 0;
        out.index[(s * c + ch) * plane + p] = std::clamp(levels - ones, 0, levels - 1);
      }
  return out;
}

Tensor relaxed_thermometer(const Tensor& soft, std::size_t axis) {
  Graph graph;
  return relaxed_thermometer(graph.constant(soft), axis).value();
}

Var relaxed_thermometer(Var soft, std::size_t axis) {
  const AxisSplit s = split_axis(soft.shape(), axis);
  Tensor out = soft.value();
  double* y = out.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t j = 0; j < s.inner; ++j) {
      double* base = y + o * s.length * s.inner + j;
      double running = 0.0;
      for (std::size_t i = 0; i < s.length; ++i) {
        running += base[i * s.inner];
        base[i * s.inner] = running;
      }
      if (std::abs(running - 1.0) > 1e-6) {
        throw ContractError("relaxed_thermometer: input sums to " + std::to_string(running) +
                            " along axis " + std::to_string(axis) + ", expected 1");
      }
    }
  return soft.graph->record(std::move(out), {soft}, [soft, s](Graph& g, std::span<const double> go) {
    auto gx = g.grad_buffer(soft.id);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t j = 0; j < s.inner; ++j) {
        const std::size_t base = o * s.length * s.inner + j;
        double running = 0.0;
        for (std::size_t i = s.length; i-- > 0;) {
          running += go[base + i * s.inner];
          gx[base + i * s.inner] += running;
        }
      }
  });
}

EncodedBatch pipeline_apply(const Pipeline& pipeline, const Tensor& batch) {
  pipeline.validate();
  Tensor x = apply_prefix(pipeline, batch);
  if (!pipeline.quantizes()) return {std::move(x), false};

  count_stage();
  Buckets buckets = quantize_unchecked(x, pipeline.levels, true);
  const auto encoding = pipeline.encoding();
  if (!encoding) return {decode(buckets), false};

  count_stage();
  return *encoding == TransformKind::one_hot ? one_hot(buckets) : thermometer_encode(buckets);
}

Tensor apply_prefix(const Pipeline& pipeline, const Tensor& batch, PrefixTrace* record, const PrefixTrace* frozen) {
  pipeline.validate();
  Tensor x = batch;
  std::size_t bn_index = 0;
  const std::size_t stop = pipeline.prefix_length();
  for (std::size_t i = 0; i < stop; ++i) {
    count_stage();
    x = prefix_stage(pipeline.transforms[i], x, record, frozen, bn_index);
  }
  return x;
}

Var apply_prefix(Var batch, const Pipeline& pipeline) {
  pipeline.validate();
  Var x = batch;
  const std::size_t stop = pipeline.prefix_length();
  for (std::size_t i = 0; i < stop; ++i) {
    const Transform& t = pipeline.transforms[i];
    count_stage();
    switch (t.kind) {
      case TransformKind::tanh_filter: {
        const double edge = std::tanh(t.scale * 0.5);
        x = affine(activation(affine(x, t.scale, -0.5 * t.scale), Activation::tanh), 0.5 / edge, 0.5);
        break;
      }
      case TransformKind::sigmoid_filter: {
        const double lo = sigmoid(-t.scale * 0.5);
        const double hi = sigmoid(t.scale * 0.5);
        x = affine(activation(affine(x, t.scale, -0.5 * t.scale), Activation::sigmoid), 1.0 / (hi - lo),
                   -lo / (hi - lo));
        break;
      }
      case TransformKind::batch_norm: x = batch_norm(x, t.bn_eps); break;
      default:
        throw UnsupportedError("apply_prefix: " + std::string(to_string(t.kind)) + " has no differentiable form");
    }
  }
  return x;
}

std::uint64_t transform_invocations() { return g_invocations.load(std::memory_order_relaxed); }

}  // namespace blindguard
