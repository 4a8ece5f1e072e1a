#include "blindguard/dataset.hpp"

#include <fstream>
#include <iterator>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

constexpr std::uint32_t kIdxImages = 0x00000803;
constexpr std::uint32_t kIdxLabels = 0x00000801;
constexpr std::size_t kCifarPixels = 3 * 32 * 32;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t big_endian_u32(const std::vector<unsigned char>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

struct IdxFile {
  std::vector<unsigned char> bytes;
  std::vector<std::size_t> dims;
  std::size_t payload = 0;
};

IdxFile read_idx(const std::filesystem::path& path, std::uint32_t magic, std::size_t rank) {
  IdxFile f{read_file(path), {}, 0};
  if (f.bytes.size() < 4) throw FormatError(path.string() + ": too short for an IDX header");
  const std::uint32_t found = big_endian_u32(f.bytes, 0);
  if (found != magic) {
    throw FormatError(path.string() + ": bad IDX magic 0x" + [&] {
      char buf[9];
      std::snprintf(buf, sizeof buf, "%08x", found);
      return std::string(buf);
    }());
  }
  f.payload = 4 + 4 * rank;
  if (f.bytes.size() < f.payload) throw IntegrityError(path.string() + ": truncated IDX header");
  std::size_t expected = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    f.dims.push_back(big_endian_u32(f.bytes, 4 + 4 * d));
    expected *= f.dims.back();
  }
  if (f.bytes.size() - f.payload != expected) {
    throw IntegrityError(path.string() + ": expected " + std::to_string(expected) + " data bytes, found " +
                         std::to_string(f.bytes.size() - f.payload));
  }
  return f;
}

}  // namespace

Dataset Dataset::slice(std::size_t begin, std::size_t count) const {
  if (begin >= size()) throw IndexError("Dataset::slice: begin " + std::to_string(begin) + " past end");
  const std::size_t end = std::min(size(), begin + count);
  return {images.slice_rows(begin, end), std::vector<int>(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                                          labels.begin() + static_cast<std::ptrdiff_t>(end)),
          split};
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out{gather_rows(images, indices), {}, split};
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  return out;
}

void Dataset::validate() const {
  if (images.rank() == 0 || images.dim(0) != labels.size()) {
    throw ConsistencyError("dataset has " + std::to_string(labels.size()) + " labels for images " +
                           to_string(images.shape()));
  }
  for (double v : images.values())
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError("dataset pixel " + std::to_string(v) + " outside [0, 1]");
}

Dataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const IdxFile img = read_idx(images, kIdxImages, 3);
  const IdxFile lab = read_idx(labels, kIdxLabels, 1);
  const std::size_t n = img.dims[0];
  if (lab.dims[0] != n) {
    throw ConsistencyError(images.string() + " holds " + std::to_string(n) + " images but " + labels.string() +
                           " holds " + std::to_string(lab.dims[0]) + " labels");
  }
  Dataset out{Tensor({n, 1, img.dims[1], img.dims[2]}), std::vector<int>(n), "mnist"};
  for (std::size_t i = 0; i < out.images.size(); ++i) out.images[i] = img.bytes[img.payload + i] / 255.0;
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = lab.bytes[lab.payload + i];
  return out;
}

Dataset load_cifar10_bin(std::span<const std::filesystem::path> files) {
  std::vector<unsigned char> all;
  for (const auto& file : files) {
    const auto bytes = read_file(file);
    if (bytes.empty() || bytes.size() % (kCifarPixels + 1) != 0) {
      throw FormatError(file.string() + ": size " + std::to_string(bytes.size()) +
                        " is not a multiple of the 3073-byte record");
    }
    all.insert(all.end(), bytes.begin(), bytes.end());
  }
  const std::size_t n = all.size() / (kCifarPixels + 1);
  if (n == 0) throw FormatError("load_cifar10_bin: no records");
  Dataset out{Tensor({n, 3, 32, 32}), std::vector<int>(n), "cifar10"};
  for (std::size_t r = 0; r < n; ++r) {
    const unsigned char* record = all.data() + r * (kCifarPixels + 1);
    if (record[0] > 9) throw FormatError("load_cifar10_bin: label byte " + std::to_string(record[0]) + " > 9");
    out.labels[r] = record[0];
    for (std::size_t p = 0; p < kCifarPixels; ++p) out.images[r * kCifarPixels + p] = record[1 + p] / 255.0;
  }
  return out;
}

Dataset load_cifar10_bin(const std::filesystem::path& directory, const std::string& split) {
  std::vector<std::filesystem::path> files;
  if (split == "train") {
    for (int i = 1; i <= 5; ++i) files.push_back(directory / ("data_batch_" + std::to_string(i) + ".bin"));
  } else if (split == "test") {
    files.push_back(directory / "test_batch.bin");
  } else {
    throw ConfigError("load_cifar10_bin: split must be train or test, got '" + split + "'");
  }
  Dataset out = load_cifar10_bin(files);
  out.split = "cifar10-" + split;
  return out;
}

}  // namespace blindguard
