#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>

#include "blindguard/dataset.hpp"
#include "blindguard/model.hpp"
#include "blindguard/preprocessing.hpp"

namespace blindguard {

/// 128-bit secret gating the pre-processing pipeline.
class BlindKey {
 public:
  static constexpr std::size_t kBytes = 16;

  BlindKey() = default;
  explicit BlindKey(const std::array<std::uint8_t, kBytes>& bytes) : bytes_(bytes) {}

  /// Fresh key from std::random_device.
  static BlindKey generate();
  /// Exactly 32 hex digits; anything else raises FormatError.
  static BlindKey from_hex(std::string_view hex);
  std::string to_hex() const;

  /// Full-width comparison; runtime does not depend on where the keys differ.
  bool matches(const BlindKey& other) const noexcept;

  /// Non-cryptographic 64-bit digest (FNV-1a) for telling keys apart in logs
  /// and configs without revealing them.
  std::uint64_t fingerprint() const noexcept;

  const std::array<std::uint8_t, kBytes>& bytes() const noexcept { return bytes_; }

 private:
  std::array<std::uint8_t, kBytes> bytes_{};
};

/// Defender-side wrapper: the pipeline can only be evaluated by presenting the key.
class BlindGate {
 public:
  BlindGate(Pipeline pipeline, BlindKey key);

  /// pipeline_apply(pipeline, batch) on key match; AccessDenied otherwise,
  /// without evaluating any transform.
  EncodedBatch apply(const BlindKey& presented, const Tensor& batch) const;

  int levels() const noexcept { return pipeline_.levels; }
  std::optional<TransformKind> encoding() const { return pipeline_.encoding(); }
  std::size_t output_channels(std::size_t input_channels) const {
    return pipeline_.output_channels(input_channels);
  }

 private:
  Pipeline pipeline_;
  BlindKey key_;
};

EncodedBatch gate_apply(const Pipeline& pipeline, const BlindKey& key, const BlindKey& presented,
                        const Tensor& batch);

/// What the attacker learns about the encoded representation.
struct EncodingFormat {
  int levels = 15;
  std::optional<TransformKind> encoding;  // nullopt: the model consumes pixels directly
};

/// The attacker's access surface under blind pre-processing: architecture,
/// weights (and therefore gradients with respect to the model input), the
/// training algorithm identifier and data before and after pre-processing.
/// It carries no pipeline, so nothing reachable from it can run a Transform.
///
/// Holds a pointer to the model; the model must outlive the view.
class AttackerView {
 public:
  const Model& model() const noexcept { return *model_; }
  const Architecture& architecture() const noexcept { return model_->architecture(); }
  const std::string& training_algorithm() const noexcept { return training_algorithm_; }
  const Tensor& raw_data() const noexcept { return raw_data_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const EncodedBatch& encoded_data() const noexcept { return encoded_data_; }
  const EncodingFormat& encoding_format() const noexcept { return format_; }

  /// Gradient of the summed cross-entropy with respect to the model input.
  /// This is where attacker gradients stop: there is no raw-pixel counterpart.
  Tensor encoded_gradient(const Tensor& encoded, std::span<const int> labels) const;

 private:
  friend AttackerView attacker_view(const Model&, const BlindGate&, const BlindKey&, const Dataset&,
                                    std::string);
  AttackerView() = default;

  const Model* model_ = nullptr;
  std::string training_algorithm_;
  Tensor raw_data_;
  std::vector<int> labels_;
  EncodedBatch encoded_data_;
  EncodingFormat format_;
};

/// Built by the defender: the dataset is encoded once through the gate with
/// `key` and handed over as static data.
AttackerView attacker_view(const Model& model, const BlindGate& gate, const BlindKey& key, const Dataset& data,
                           std::string training_algorithm = "sgd-momentum");

/// 2^(m + 3n).
boost::multiprecision::cpp_int key_space_size(unsigned m, unsigned n);

}  // namespace blindguard
