#include "blindguard/blind.hpp"

#include <random>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BlindKey BlindKey::generate() {
  std::random_device device;
  std::array<std::uint8_t, kBytes> bytes{};
  for (std::size_t i = 0; i < kBytes; i += 4) {
    const std::uint32_t word = device();
    for (std::size_t j = 0; j < 4; ++j) bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
  }
  return BlindKey(bytes);
}

BlindKey BlindKey::from_hex(std::string_view hex) {
  if (hex.size() != 2 * kBytes) {
    throw FormatError("key must be " + std::to_string(2 * kBytes) + " hex digits, got " +
                      std::to_string(hex.size()) + " characters");
  }
  std::array<std::uint8_t, kBytes> bytes{};
  for (std::size_t i = 0; i < kBytes; ++i) {
    const int hi = hex_digit(hex[2 * i]);
    const int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw FormatError("key contains a non-hex character");
    bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return BlindKey(bytes);
}

std::string BlindKey::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * kBytes);
  for (std::uint8_t b : bytes_) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

bool BlindKey::matches(const BlindKey& other) const noexcept {
  volatile std::uint8_t diff = 0;
  for (std::size_t i = 0; i < kBytes; ++i) diff = diff | static_cast<std::uint8_t>(bytes_[i] ^ other.bytes_[i]);
  return diff == 0;
}

std::uint64_t BlindKey::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes_) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BlindGate::BlindGate(Pipeline pipeline, BlindKey key) : pipeline_(std::move(pipeline)), key_(key) {
  pipeline_.validate();
}

EncodedBatch BlindGate::apply(const BlindKey& presented, const Tensor& batch) const {
  if (!key_.matches(presented)) throw AccessDenied("pre-processing gate: key rejected");
  return pipeline_apply(pipeline_, batch);
}

EncodedBatch gate_apply(const Pipeline& pipeline, const BlindKey& key, const BlindKey& presented,
                        const Tensor& batch) {
  if (!key.matches(presented)) throw AccessDenied("pre-processing gate: key rejected");
  return pipeline_apply(pipeline, batch);
}

Tensor AttackerView::encoded_gradient(const Tensor& encoded, std::span<const int> labels) const {
  Graph graph;
  Var input = graph.leaf(encoded, true);
  graph.backward(softmax_cross_entropy(model_->forward(input), labels, Reduction::sum));
  return input.grad();
}

AttackerView attacker_view(const Model& model, const BlindGate& gate, const BlindKey& key, const Dataset& data,
                           std::string training_algorithm) {
  AttackerView view;
  view.model_ = &model;
  view.training_algorithm_ = std::move(training_algorithm);
  view.raw_data_ = data.images;
  view.labels_ = data.labels;
  view.encoded_data_ = gate.apply(key, data.images);
  view.format_ = {gate.levels(), gate.encoding()};
  return view;
}

boost::multiprecision::cpp_int key_space_size(unsigned m, unsigned n) {
  boost::multiprecision::cpp_int one = 1;
  return one << (m + 3 * n);
}

}  // namespace blindguard
