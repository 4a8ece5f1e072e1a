#include "blindguard/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

void require_same_shape(const char* op, Var a, Var b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
  }
}

void require_rank(const char* op, Var x, std::size_t rank) {
  if (x.shape().size() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                         to_string(x.shape()));
  }
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t length = 1;
  std::size_t inner = 1;
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

struct ConvGeometry {
  std::size_t batch, cin, height, width;
  std::size_t cout, radius, taps;
  std::size_t out_h, out_w;
  std::ptrdiff_t pad;

  std::size_t patch() const { return cin * taps * taps; }
  std::size_t positions() const { return out_h * out_w; }
};

ConvGeometry conv_geometry(const Shape& in, const Shape& k, Padding padding) {
  if (in.size() != 4 || k.size() != 4) {
    throw DimensionError("conv2d: expected input [batch x cin x h x w] and kernel [cout x cin x r x r], got " +
                         to_string(in) + " and " + to_string(k));
  }
  if (in[1] != k[1]) {
    throw DimensionError("conv2d: channel mismatch, input " + to_string(in) + " vs kernel " + to_string(k));
  }
  if (k[2] != k[3] || k[2] % 2 == 0) {
    throw ContractError("conv2d: kernel must be square with odd size, got " + to_string(k));
  }
  ConvGeometry g{};
  g.batch = in[0];
  g.cin = in[1];
  g.height = in[2];
  g.width = in[3];
  g.cout = k[0];
  g.taps = k[2];
  g.radius = k[2] / 2;
  if (padding == Padding::same) {
    g.pad = static_cast<std::ptrdiff_t>(g.radius);
    g.out_h = g.height;
    g.out_w = g.width;
  } else {
    if (g.height < g.taps || g.width < g.taps) {
      throw DimensionError("conv2d: valid padding with kernel " + to_string(k) + " larger than input " +
                           to_string(in));
    }
    g.pad = 0;
    g.out_h = g.height - g.taps + 1;
    g.out_w = g.width - g.taps + 1;
  }
  return g;
}

// cols[(c * r + ky) * r + kx][oy * out_w + ox] = image[c][oy + ky - pad][ox + kx - pad]
void im2col(const ConvGeometry& g, const double* image, double* cols) {
  const auto h = static_cast<std::ptrdiff_t>(g.height);
  const auto w = static_cast<std::ptrdiff_t>(g.width);
  for (std::size_t c = 0; c < g.cin; ++c) {
    for (std::size_t ky = 0; ky < g.taps; ++ky) {
      for (std::size_t kx = 0; kx < g.taps; ++kx) {
        double* row = cols + ((c * g.taps + ky) * g.taps + kx) * g.positions();
        const double* plane = image + c * g.height * g.width;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - g.pad;
          double* out = row + oy * g.out_w;
          if (iy < 0 || iy >= h) {
            std::fill(out, out + g.out_w, 0.0);
            continue;
          }
          const double* src = plane + iy * w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - g.pad;
            out[ox] = (ix < 0 || ix >= w) ? 0.0 : src[ix];
          }
        }
      }
    }
  }
}

void col2im_accumulate(const ConvGeometry& g, const double* cols, double* image) {
  const auto h = static_cast<std::ptrdiff_t>(g.height);
  const auto w = static_cast<std::ptrdiff_t>(g.width);
  for (std::size_t c = 0; c < g.cin; ++c) {
    for (std::size_t ky = 0; ky < g.taps; ++ky) {
      for (std::size_t kx = 0; kx < g.taps; ++kx) {
        const double* row = cols + ((c * g.taps + ky) * g.taps + kx) * g.positions();
        double* plane = image + c * g.height * g.width;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - g.pad;
          if (iy < 0 || iy >= h) continue;
          const double* src = row + oy * g.out_w;
          double* dst = plane + iy * w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - g.pad;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  Tensor out = a.value();
  const auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.graph->record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    for (Var v : {a, b}) {
      if (!g.tracked(v.id)) continue;
      auto gv = g.grad_buffer(v.id);
      for (std::size_t i = 0; i < go.size(); ++i) gv[i] += go[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  Tensor out = a.value();
  const auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.graph->record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    if (g.tracked(a.id)) {
      auto ga = g.grad_buffer(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    }
    if (g.tracked(b.id)) {
      auto gb = g.grad_buffer(b.id);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a, b);
  Tensor out = a.value();
  const auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.graph->record(std::move(out), {a, b}, [a, b](Graph& g, std::span<const double> go) {
    const auto av = g.value(a.id).values();
    const auto bv = g.value(b.id).values();
    if (g.tracked(a.id)) {
      auto ga = g.grad_buffer(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv[i];
    }
    if (g.tracked(b.id)) {
      auto gb = g.grad_buffer(b.id);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
    }
  });
}

Var affine(Var x, double scale, double shift) {
  Tensor out = x.value();
  for (double& v : out.values()) v = scale * v + shift;
  return x.graph->record(std::move(out), {x}, [x, scale](Graph& g, std::span<const double> go) {
    auto gx = g.grad_buffer(x.id);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += scale * go[i];
  });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return x.graph->record(Tensor::scalar(total), {x}, [x](Graph& g, std::span<const double> go) {
    auto gx = g.grad_buffer(x.id);
    for (double& v : gx) v += go[0];
  });
}

Var matmul(Var a, Var b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw DimensionError("matmul: inner dimensions differ, " + to_string(a.shape()) + " x " +
                         to_string(b.shape()));
  }
  Tensor out({m, n});
  const auto em = static_cast<Eigen::Index>(m), ek = static_cast<Eigen::Index>(k),
             en = static_cast<Eigen::Index>(n);
  MatrixMap(out.data(), em, en).noalias() =
      ConstMatrixMap(a.value().data(), em, ek) * ConstMatrixMap(b.value().data(), ek, en);
  return a.graph->record(std::move(out), {a, b}, [a, b, em, ek, en](Graph& g, std::span<const double> go) {
    ConstMatrixMap dout(go.data(), em, en);
    if (g.tracked(a.id)) {
      MatrixMap(g.grad_buffer(a.id).data(), em, ek).noalias() +=
          dout * ConstMatrixMap(g.value(b.id).data(), ek, en).transpose();
    }
    if (g.tracked(b.id)) {
      MatrixMap(g.grad_buffer(b.id).data(), ek, en).noalias() +=
          ConstMatrixMap(g.value(a.id).data(), em, ek).transpose() * dout;
    }
  });
}

Var add_row_bias(Var x, Var bias) {
  require_rank("add_row_bias", x, 2);
  require_rank("add_row_bias", bias, 1);
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (bias.shape()[0] != n) {
    throw DimensionError("add_row_bias: bias " + to_string(bias.shape()) + " does not match " + to_string(x.shape()));
  }
  Tensor out = x.value();
  const auto bv = bias.value().values();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bv[c];
  return x.graph->record(std::move(out), {x, bias}, [x, bias, m, n](Graph& g, std::span<const double> go) {
    if (g.tracked(x.id)) {
      auto gx = g.grad_buffer(x.id);
      for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
    }
    if (g.tracked(bias.id)) {
      auto gb = g.grad_buffer(bias.id);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) gb[c] += go[r * n + c];
    }
  });
}

Var add_channel_bias(Var x, Var bias) {
  require_rank("add_channel_bias", bias, 1);
  const Shape& s = x.shape();
  if (s.size() < 2 || s[1] != bias.shape()[0]) {
    throw DimensionError("add_channel_bias: bias " + to_string(bias.shape()) + " does not match " + to_string(s));
  }
  const std::size_t batch = s[0], channels = s[1], inner = x.value().size() / (batch * channels);
  Tensor out = x.value();
  const auto bv = bias.value().values();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c) {
      double* p = out.data() + (b * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) p[i] += bv[c];
    }
  return x.graph->record(std::move(out), {x, bias},
                         [x, bias, batch, channels, inner](Graph& g, std::span<const double> go) {
                           if (g.tracked(x.id)) {
                             auto gx = g.grad_buffer(x.id);
                             for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
                           }
                           if (g.tracked(bias.id)) {
                             auto gb = g.grad_buffer(bias.id);
                             for (std::size_t b = 0; b < batch; ++b)
                               for (std::size_t c = 0; c < channels; ++c) {
                                 const double* p = go.data() + (b * channels + c) * inner;
                                 double acc = 0.0;
                                 for (std::size_t i = 0; i < inner; ++i) acc += p[i];
                                 gb[c] += acc;
                               }
                           }
                         });
}

Var conv2d(Var input, Var kernel, Padding padding) {
  const ConvGeometry geo = conv_geometry(input.shape(), kernel.shape(), padding);
  const auto rows = static_cast<Eigen::Index>(geo.cout);
  const auto patch = static_cast<Eigen::Index>(geo.patch());
  const auto positions = static_cast<Eigen::Index>(geo.positions());

  Tensor out({geo.batch, geo.cout, geo.out_h, geo.out_w});
  std::vector<double> cols(geo.patch() * geo.positions());
  ConstMatrixMap weights(kernel.value().data(), rows, patch);
  const std::size_t in_stride = geo.cin * geo.height * geo.width;
  const std::size_t out_stride = geo.cout * geo.positions();
  for (std::size_t n = 0; n < geo.batch; ++n) {
    im2col(geo, input.value().data() + n * in_stride, cols.data());
    MatrixMap(out.data() + n * out_stride, rows, positions).noalias() =
        weights * ConstMatrixMap(cols.data(), patch, positions);
  }

  return input.graph->record(
      std::move(out), {input, kernel},
      [input, kernel, geo, rows, patch, positions, in_stride, out_stride](Graph& g, std::span<const double> go) {
        const bool want_input = g.tracked(input.id);
        const bool want_kernel = g.tracked(kernel.id);
        std::vector<double> cols(geo.patch() * geo.positions());
        ConstMatrixMap weights(g.value(kernel.id).data(), rows, patch);
        for (std::size_t n = 0; n < geo.batch; ++n) {
          ConstMatrixMap dout(go.data() + n * out_stride, rows, positions);
          if (want_kernel) {
            im2col(geo, g.value(input.id).data() + n * in_stride, cols.data());
            MatrixMap(g.grad_buffer(kernel.id).data(), rows, patch).noalias() +=
                dout * ConstMatrixMap(cols.data(), patch, positions).transpose();
          }
          if (want_input) {
            MatrixMap(cols.data(), patch, positions).noalias() = weights.transpose() * dout;
            col2im_accumulate(geo, cols.data(), g.grad_buffer(input.id).data() + n * in_stride);
          }
        }
      });
}

Var maxpool2(Var input) {
  require_rank("maxpool2", input, 4);
  const Shape& s = input.shape();
  const std::size_t batch = s[0], ch = s[1], h = s[2], w = s[3];
  if (h < 2 || w < 2) throw DimensionError("maxpool2: spatial size below 2 in " + to_string(s));
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor out({batch, ch, oh, ow});
  std::vector<std::size_t> winners(out.size());
  const double* x = input.value().data();
  for (std::size_t p = 0; p < batch * ch; ++p) {
    const double* plane = x + p * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = (2 * oy) * w + 2 * ox;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (2 * oy + dy) * w + 2 * ox + dx;
            if (plane[idx] > plane[best]) best = idx;
          }
        const std::size_t o = (p * oh + oy) * ow + ox;
        out[o] = plane[best];
        winners[o] = p * h * w + best;
      }
  }
  return input.graph->record(std::move(out), {input},
                             [input, winners = std::move(winners)](Graph& g, std::span<const double> go) {
                               auto gx = g.grad_buffer(input.id);
                               for (std::size_t o = 0; o < go.size(); ++o) gx[winners[o]] += go[o];
                             });
}

Var activation(Var x, Activation kind) {
  Tensor out = x.value();
  switch (kind) {
    case Activation::relu:
      for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::tanh:
      for (double& v : out.values()) v = std::tanh(v);
      break;
    case Activation::sigmoid:
      for (double& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
      break;
  }
  Graph* graph = x.graph;
  const std::size_t self = graph->size();  // id the recorded node will get
  return graph->record(std::move(out), {x}, [x, self, kind](Graph& g, std::span<const double> go) {
    const auto xv = g.value(x.id).values();
    const auto yv = g.value(self).values();
    auto gx = g.grad_buffer(x.id);
    for (std::size_t i = 0; i < go.size(); ++i) {
      double d = 0.0;
      switch (kind) {
        case Activation::relu: d = xv[i] > 0.0 ? 1.0 : 0.0; break;
        case Activation::tanh: d = 1.0 - yv[i] * yv[i]; break;
        case Activation::sigmoid: d = yv[i] * (1.0 - yv[i]); break;
      }
      gx[i] += d * go[i];
    }
  });
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return x.graph->record(std::move(out), {x}, [x](Graph& g, std::span<const double> go) {
    auto gx = g.grad_buffer(x.id);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
  });
}

Var softmax(Var x, std::size_t axis) {
  const AxisSplit s = split_axis(x.shape(), axis);
  Tensor out = x.value();
  double* y = out.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t j = 0; j < s.inner; ++j) {
      double* base = y + o * s.length * s.inner + j;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < s.length; ++i) peak = std::max(peak, base[i * s.inner]);
      double total = 0.0;
      for (std::size_t i = 0; i < s.length; ++i) {
        base[i * s.inner] = std::exp(base[i * s.inner] - peak);
        total += base[i * s.inner];
      }
      for (std::size_t i = 0; i < s.length; ++i) base[i * s.inner] /= total;
    }
  Graph* graph = x.graph;
  const std::size_t self = graph->size();
  return graph->record(std::move(out), {x}, [x, s, self](Graph& g, std::span<const double> go) {
    const double* y = g.value(self).data();
    auto gx = g.grad_buffer(x.id);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t j = 0; j < s.inner; ++j) {
        const std::size_t base = o * s.length * s.inner + j;
        double dot = 0.0;
        for (std::size_t i = 0; i < s.length; ++i) dot += go[base + i * s.inner] * y[base + i * s.inner];
        for (std::size_t i = 0; i < s.length; ++i) {
          const std::size_t idx = base + i * s.inner;
          gx[idx] += y[idx] * (go[idx] - dot);
        }
      }
  });
}

Var contract_axis(Var x, std::size_t axis, std::span<const double> weights) {
  const AxisSplit s = split_axis(x.shape(), axis);
  if (weights.size() != s.length) {
    throw DimensionError("contract_axis: " + std::to_string(weights.size()) + " weights for axis of length " +
                         std::to_string(s.length));
  }
  Shape shape = x.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  if (shape.empty()) shape.push_back(1);
  Tensor out(shape);
  const double* xv = x.value().data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.length; ++i)
      for (std::size_t j = 0; j < s.inner; ++j)
        out[o * s.inner + j] += weights[i] * xv[(o * s.length + i) * s.inner + j];
  std::vector<double> w(weights.begin(), weights.end());
  return x.graph->record(std::move(out), {x}, [x, s, w = std::move(w)](Graph& g, std::span<const double> go) {
    auto gx = g.grad_buffer(x.id);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.length; ++i)
        for (std::size_t j = 0; j < s.inner; ++j) gx[(o * s.length + i) * s.inner + j] += w[i] * go[o * s.inner + j];
  });
}

Var batch_norm(Var x, double eps) {
  const Tensor& in = x.value();
  const double n = static_cast<double>(in.size());
  double mean = 0.0;
  for (double v : in.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : in.values()) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / n);
  const double denom = sigma + eps;
  Tensor out = in;
  for (double& v : out.values()) v = (v - mean) / denom;
  return x.graph->record(std::move(out), {x}, [x, mean, sigma, denom, n](Graph& g, std::span<const double> go) {
    const auto xv = g.value(x.id).values();
    double go_mean = 0.0, go_dot = 0.0;
    for (std::size_t i = 0; i < go.size(); ++i) {
      go_mean += go[i];
      go_dot += go[i] * (xv[i] - mean);
    }
    go_mean /= n;
    const double coupling = sigma > 0.0 ? go_dot / (denom * denom * n * sigma) : 0.0;
    auto gx = g.grad_buffer(x.id);
    for (std::size_t i = 0; i < go.size(); ++i) {
      gx[i] += (go[i] - go_mean) / denom - coupling * (xv[i] - mean);
    }
  });
}

Var softmax_cross_entropy(Var logits, std::span<const int> labels, Reduction reduction) {
  require_rank("softmax_cross_entropy", logits, 2);
  const std::size_t batch = logits.shape()[0], classes = logits.shape()[1];
  if (labels.size() != batch) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for batch of " +
                         std::to_string(batch));
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw IndexError("label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    }
  }
  const double* z = logits.value().data();
  std::vector<double> probs(batch * classes);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = z + b * classes;
    const double peak = *std::max_element(row, row + classes);
    double norm = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      probs[b * classes + c] = std::exp(row[c] - peak);
      norm += probs[b * classes + c];
    }
    for (std::size_t c = 0; c < classes; ++c) probs[b * classes + c] /= norm;
    total += -(row[labels[b]] - peak - std::log(norm));
  }
  const double factor = reduction == Reduction::mean ? 1.0 / static_cast<double>(batch) : 1.0;
  std::vector<int> lab(labels.begin(), labels.end());
  return logits.graph->record(
      Tensor::scalar(total * factor), {logits},
      [logits, probs = std::move(probs), lab = std::move(lab), classes, factor](Graph& g, std::span<const double> go) {
        auto gz = g.grad_buffer(logits.id);
        for (std::size_t b = 0; b < lab.size(); ++b)
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = static_cast<std::size_t>(lab[b]) == c ? 1.0 : 0.0;
            gz[b * classes + c] += go[0] * factor * (probs[b * classes + c] - onehot);
          }
      });
}

std::vector<double> cross_entropy_per_example(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw DimensionError("cross_entropy_per_example: logits " + to_string(logits.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t classes = logits.dim(1);
  std::vector<double> losses(labels.size());
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= classes) throw IndexError("label out of range");
    const double* row = logits.data() + b * classes;
    const double peak = *std::max_element(row, row + classes);
    double norm = 0.0;
    for (std::size_t c = 0; c < classes; ++c) norm += std::exp(row[c] - peak);
    losses[b] = -(row[labels[b]] - peak - std::log(norm));
  }
  return losses;
}

std::vector<int> argmax_rows(const Tensor& logits) {
  if (logits.rank() != 2) throw DimensionError("argmax_rows: expected rank 2, got " + to_string(logits.shape()));
  const std::size_t classes = logits.dim(1);
  std::vector<int> out(logits.dim(0));
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* row = logits.data() + b * classes;
    out[b] = static_cast<int>(std::max_element(row, row + classes) - row);
  }
  return out;
}

}  // namespace blindguard
