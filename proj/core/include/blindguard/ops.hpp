#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blindguard/autodiff.hpp"

namespace blindguard {

enum class Activation { relu, tanh, sigmoid };
enum class Padding { valid, same };
enum class Reduction { mean, sum };

// Elementwise arithmetic. Binary ops require identical shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// scale * x + shift
Var affine(Var x, double scale, double shift = 0.0);
Var sum(Var x);

/// [m x k] * [k x n]
Var matmul(Var a, Var b);
/// x [m x n] + bias [n] broadcast over rows.
Var add_row_bias(Var x, Var bias);
/// x [batch x C x ...] + bias [C] broadcast over the trailing axes.
Var add_channel_bias(Var x, Var bias);

/// Stride-1 cross-correlation (no kernel flip).
/// input [batch x cin x h x w], kernel [cout x cin x r x r] with r odd.
Var conv2d(Var input, Var kernel, Padding padding);

/// 2x2 max pooling with stride 2 over [batch x c x h x w]; odd trailing rows/cols are dropped.
Var maxpool2(Var input);

Var activation(Var x, Activation kind);
Var reshape(Var x, Shape shape);

/// Softmax along `axis`, max-subtracted.
Var softmax(Var x, std::size_t axis);

/// Weighted sum over `axis` (the axis is removed): out = sum_i weights[i] * x[..., i, ...].
Var contract_axis(Var x, std::size_t axis, std::span<const double> weights);

/// (x - mean) / (std + eps) with a single population mean/std over the whole tensor.
/// Gradients flow through the statistics.
Var batch_norm(Var x, double eps);

/// Cross-entropy of softmax(logits [batch x C]) against integer labels.
/// Mean reduction gives gradient (softmax - onehot) / batch.
Var softmax_cross_entropy(Var logits, std::span<const int> labels, Reduction reduction = Reduction::mean);

// Graph-free helpers over logits [batch x C].
std::vector<double> cross_entropy_per_example(const Tensor& logits, std::span<const int> labels);
std::vector<int> argmax_rows(const Tensor& logits);

}  // namespace blindguard
