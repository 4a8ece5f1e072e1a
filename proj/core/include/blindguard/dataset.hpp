#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blindguard/tensor.hpp"

namespace blindguard {

/// Labelled images with values in [0, 1], shape [n x c x h x w].
struct Dataset {
  Tensor images;
  std::vector<int> labels;
  std::string split;

  std::size_t size() const noexcept { return labels.size(); }
  /// Examples [begin, begin + count), clipped to the dataset size.
  Dataset slice(std::size_t begin, std::size_t count) const;
  Dataset select(std::span<const std::size_t> indices) const;
  /// Throws ConsistencyError on count mismatch, RangeError on pixels outside [0, 1].
  void validate() const;
};

/// IDX image/label pair (MNIST). Pixels are scaled by 1/255; shape n x 1 x 28 x 28.
Dataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Every `data_batch_*.bin` / `test_batch.bin` style file given, concatenated
/// in order. Records are 1 label byte + 3072 channel-major pixel bytes.
Dataset load_cifar10_bin(std::span<const std::filesystem::path> files);
/// `split` = "train" reads data_batch_1..5.bin, "test" reads test_batch.bin.
Dataset load_cifar10_bin(const std::filesystem::path& directory, const std::string& split = "test");

}  // namespace blindguard
