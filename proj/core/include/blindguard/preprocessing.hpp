#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindguard/autodiff.hpp"
#include "blindguard/tensor.hpp"

namespace blindguard {

enum class TransformKind {
  tanh_filter,
  sigmoid_filter,
  batch_norm,
  max_smooth,
  avg_smooth,
  quantize,
  one_hot,
  thermometer,
};

std::string_view to_string(TransformKind kind);
/// Throws ConfigError for unknown names.
TransformKind transform_kind_from_string(std::string_view name);

/// One pre-processing stage. Only the parameters relevant to `kind` are read.
struct Transform {
  TransformKind kind = TransformKind::tanh_filter;
  double scale = 4.0;    // tanh/sigmoid filter slope around the 0.5 centre
  int window = 3;        // smoothing window (odd, >= 3)
  int levels = 15;       // quantization levels k
  double bn_eps = 1e-5;  // batch_norm denominator offset

  static Transform tanh_filter(double scale = 4.0);
  static Transform sigmoid_filter(double scale = 4.0);
  static Transform batch_norm(double eps = 1e-5);
  static Transform max_smooth(int window = 3);
  static Transform avg_smooth(int window = 3);
  static Transform quantize(int levels = 15);
  static Transform one_hot(int levels = 15);
  static Transform thermometer(int levels = 15);

  bool is_encoding() const { return kind == TransformKind::one_hot || kind == TransformKind::thermometer; }
  /// Throws ConfigError on out-of-range parameters.
  void validate() const;

  friend bool operator==(const Transform&, const Transform&) = default;
};

/// Ordered pre-processing stages plus the quantization level shared by the
/// quantize and encoding stages.
struct Pipeline {
  std::vector<Transform> transforms;
  int levels = 15;

  /// tanh_filter -> [max_smooth] -> batch_norm -> quantize -> thermometer.
  static Pipeline canonical(bool max_smoothing = false, int levels = 15);

  /// Throws ConfigError if the stage order is invalid: at most one quantize,
  /// an encoding only directly after quantize and only as the last stage,
  /// nothing but an encoding after quantize.
  void validate() const;

  bool empty() const { return transforms.empty(); }
  bool quantizes() const;
  std::optional<TransformKind> encoding() const;
  /// Number of stages before quantize (or all stages if there is none).
  std::size_t prefix_length() const;
  std::size_t output_channels(std::size_t input_channels) const;
  std::string describe() const;

  friend bool operator==(const Pipeline&, const Pipeline&) = default;
};

/// Encodings expand channels: [batch x cin x h x w] -> [batch x (cin*k) x h x w],
/// channel c*k + i holding level i of input channel c.
struct EncodedBatch {
  Tensor data;
  bool discrete = false;
};

/// Integer bucket indices in [0, levels) with the shape of the quantized tensor.
struct Buckets {
  Shape shape;
  std::vector<int> index;
  int levels = 0;
};

struct BatchStats {
  double mean = 0.0;
  double stddev = 0.0;
};

// --- individual transforms -------------------------------------------------

/// tanh(scale * (x - 0.5)) remapped affinely so that 0 -> 0, 0.5 -> 0.5, 1 -> 1.
Tensor tanh_filter(const Tensor& batch, double scale = 4.0);
/// Logistic analogue of tanh_filter.
Tensor sigmoid_filter(const Tensor& batch, double scale = 4.0);

/// Population mean/stddev over every element of the batch.
BatchStats batch_statistics(const Tensor& batch);
/// (x - mean) / (stddev + eps) with one mean/stddev for the whole batch.
Tensor batch_normalize(const Tensor& batch, double eps = 1e-5);
Tensor batch_normalize(const Tensor& batch, double eps, const BatchStats& stats);

enum class SmoothKind { max, avg };
/// Sliding window over each [h x w] plane of a [batch x c x h x w] tensor,
/// edges replicated, shape preserved.
Tensor smooth(const Tensor& batch, SmoothKind kind, int window = 3);

/// b = min(floor(x * k), k - 1). Values outside [0, 1] raise RangeError.
Buckets quantize(const Tensor& batch, int levels);
/// Representative value (b + 0.5) / k per bucket.
Tensor decode(const Buckets& buckets);

/// Exactly one 1 per pixel at channel b.
EncodedBatch one_hot(const Buckets& buckets);
/// Ones from position b onward: t_i = 1 iff i >= b.
EncodedBatch thermometer_encode(const Buckets& buckets);
/// Inverse of thermometer_encode (bucket = k - number of ones).
Buckets thermometer_decode(const Tensor& encoded, int levels);

/// Cumulative sums along `axis`, t_i = sum_{j <= i} soft_j, so that a one-hot
/// `soft` at b yields exactly thermometer_encode(b). `soft` must sum to 1 along
/// the axis (tolerance 1e-6), otherwise ContractError.
Tensor relaxed_thermometer(const Tensor& soft, std::size_t axis);
Var relaxed_thermometer(Var soft, std::size_t axis);

// --- pipelines -------------------------------------------------------------

/// Applies every stage in order. The quantize stage saturates its input into
/// [0, 1] first, since batch_norm output is unbounded. Output is discrete iff
/// the pipeline ends in an encoding; a trailing quantize yields decoded values.
EncodedBatch pipeline_apply(const Pipeline& pipeline, const Tensor& batch);

/// Batch statistics used by each batch_norm stage of a prefix evaluation.
struct PrefixTrace {
  std::vector<BatchStats> bn_stats;
};

/// Runs the stages before quantize. With `frozen`, batch_norm stages reuse the
/// recorded statistics instead of recomputing them from `batch`.
Tensor apply_prefix(const Pipeline& pipeline, const Tensor& batch, PrefixTrace* record = nullptr,
                    const PrefixTrace* frozen = nullptr);

/// Differentiable version of the prefix (filters and batch_norm only;
/// smoothing raises UnsupportedError).
Var apply_prefix(Var batch, const Pipeline& pipeline);

/// Number of pipeline stages executed process-wide. Incremented by every
/// stage run through pipeline_apply/apply_prefix; the standalone transform
/// functions above do not count.
std::uint64_t transform_invocations();

}  // namespace blindguard
