#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindguard/model.hpp"
#include "blindguard/preprocessing.hpp"

namespace blindguard {

struct TrainingMetadata {
  std::string algorithm = "sgd-momentum";
  int epochs = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  /// BlindKey::fingerprint() of the key gating the pipeline, so a later run
  /// can tell a wrong key from the right one. The key itself is never stored.
  std::optional<std::uint64_t> key_fingerprint;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Everything needed to reuse a trained model. Keys are never part of it.
struct Checkpoint {
  Model model;
  std::optional<Pipeline> pipeline;
  TrainingMetadata training;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Layout: "BGCKPT01", u64 LE metadata length, metadata (JSON), parameter
/// blocks as LE f64 in declaration order, u64 LE FNV-1a checksum of all
/// preceding bytes.
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint);
/// FormatError on a bad magic or malformed metadata, IntegrityError on
/// truncation or checksum mismatch.
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// JSON text forms shared by checkpoints and configuration files. Parsing is
/// strict: unknown fields raise ConfigError.
std::string pipeline_to_json(const Pipeline& pipeline);
Pipeline pipeline_from_json(std::string_view text);
std::string architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(std::string_view text);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace blindguard
