#include "blindguard/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <set>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kMagic = "BGCKPT01";

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[offset + i]} << (8 * i);
  return v;
}

void require_fields(const Json& j, const std::string& what, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
  const std::set<std::string_view> names(allowed);
  for (const auto& item : j.items()) {
    if (!names.contains(item.key())) throw ConfigError(what + ": unknown field '" + item.key() + "'");
  }
}

template <typename T>
T field(const Json& j, const char* name, const std::string& what, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(what + ": field '" + name + "' has the wrong type");
  }
}

Json transform_json(const Transform& t) {
  Json j;
  j["kind"] = std::string(to_string(t.kind));
  switch (t.kind) {
    case TransformKind::tanh_filter:
    case TransformKind::sigmoid_filter: j["scale"] = t.scale; break;
    case TransformKind::batch_norm: j["eps"] = t.bn_eps; break;
    case TransformKind::max_smooth:
    case TransformKind::avg_smooth: j["window"] = t.window; break;
    default: j["levels"] = t.levels; break;
  }
  return j;
}

Json pipeline_json(const Pipeline& p) {
  Json j;
  j["levels"] = p.levels;
  j["transforms"] = Json::array();
  for (const Transform& t : p.transforms) j["transforms"].push_back(transform_json(t));
  return j;
}

Pipeline pipeline_from(const Json& j) {
  require_fields(j, "pipeline", {"levels", "transforms"});
  Pipeline p;
  p.levels = field<int>(j, "levels", "pipeline", 15);
  if (j.contains("transforms")) {
    if (!j["transforms"].is_array()) throw ConfigError("pipeline: transforms must be an array");
    for (const Json& tj : j["transforms"]) {
      if (!tj.is_object() || !tj.contains("kind")) throw ConfigError("pipeline: every transform needs a kind");
      Transform t;
      t.kind = transform_kind_from_string(field<std::string>(tj, "kind", "transform", ""));
      const std::string what = "transform " + std::string(to_string(t.kind));
      switch (t.kind) {
        case TransformKind::tanh_filter:
        case TransformKind::sigmoid_filter:
          require_fields(tj, what, {"kind", "scale"});
          t.scale = field<double>(tj, "scale", what, 4.0);
          break;
        case TransformKind::batch_norm:
          require_fields(tj, what, {"kind", "eps"});
          t.bn_eps = field<double>(tj, "eps", what, 1e-5);
          break;
        case TransformKind::max_smooth:
        case TransformKind::avg_smooth:
          require_fields(tj, what, {"kind", "window"});
          t.window = field<int>(tj, "window", what, 3);
          break;
        default:
          require_fields(tj, what, {"kind", "levels"});
          t.levels = field<int>(tj, "levels", what, p.levels);
          break;
      }
      p.transforms.push_back(t);
    }
  }
  p.validate();
  return p;
}

Json architecture_json(const Architecture& a) {
  Json j;
  j["in_channels"] = a.in_channels;
  j["height"] = a.height;
  j["width"] = a.width;
  j["classes"] = a.classes;
  j["padding"] = a.padding == Padding::same ? "same" : "valid";
  j["layers"] = Json::array();
  for (const LayerSpec& l : a.layers) {
    Json lj;
    lj["kind"] = std::string(to_string(l.kind));
    if (l.kind == LayerKind::conv) lj["kernel"] = l.kernel;
    if (l.kind == LayerKind::conv || l.kind == LayerKind::dense) lj["units"] = l.units;
    j["layers"].push_back(lj);
  }
  return j;
}

Architecture architecture_from(const Json& j) {
  require_fields(j, "architecture", {"in_channels", "height", "width", "classes", "padding", "layers"});
  Architecture a;
  a.in_channels = field<std::size_t>(j, "in_channels", "architecture", 1);
  a.height = field<std::size_t>(j, "height", "architecture", 28);
  a.width = field<std::size_t>(j, "width", "architecture", 28);
  a.classes = field<std::size_t>(j, "classes", "architecture", 10);
  const std::string padding = field<std::string>(j, "padding", "architecture", "same");
  if (padding != "same" && padding != "valid") throw ConfigError("architecture: padding must be same or valid");
  a.padding = padding == "same" ? Padding::same : Padding::valid;
  if (!j.contains("layers") || !j["layers"].is_array()) throw ConfigError("architecture: layers array required");
  for (const Json& lj : j["layers"]) {
    require_fields(lj, "layer", {"kind", "kernel", "units"});
    LayerSpec l;
    l.kind = layer_kind_from_string(field<std::string>(lj, "kind", "layer", ""));
    l.kernel = field<std::size_t>(lj, "kernel", "layer", 0);
    l.units = field<std::size_t>(lj, "units", "layer", 0);
    a.layers.push_back(l);
  }
  a.infer_shapes();
  return a;
}

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string pipeline_to_json(const Pipeline& pipeline) { return pipeline_json(pipeline).dump(); }
Pipeline pipeline_from_json(std::string_view text) { return pipeline_from(parse_json(text, "pipeline")); }
std::string architecture_to_json(const Architecture& arch) { return architecture_json(arch).dump(); }
Architecture architecture_from_json(std::string_view text) {
  return architecture_from(parse_json(text, "architecture"));
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes a little-endian host");
  Json meta;
  meta["architecture"] = architecture_json(checkpoint.model.architecture());
  meta["pipeline"] = checkpoint.pipeline ? pipeline_json(*checkpoint.pipeline) : Json();
  Json training;
  training["algorithm"] = checkpoint.training.algorithm;
  training["epochs"] = checkpoint.training.epochs;
  training["seed"] = checkpoint.training.seed;
  training["metrics"] = Json::object();
  for (const auto& [name, value] : checkpoint.training.metrics) training["metrics"][name] = value;
  if (checkpoint.training.key_fingerprint) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(*checkpoint.training.key_fingerprint));
    training["key_fingerprint"] = hex;
  }
  meta["training"] = training;
  meta["parameters"] = Json::array();
  for (const Tensor& p : checkpoint.model.parameters()) meta["parameters"].push_back(p.shape());
  const std::string text = meta.dump();

  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const Tensor& p : checkpoint.model.parameters()) {
    const auto* raw = reinterpret_cast<const std::uint8_t*>(p.data());
    out.insert(out.end(), raw, raw + p.size() * sizeof(double));
  }
  put_u64(out, fnv1a64(out));
  return out;
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("checkpoint: missing BGCKPT01 magic");
  }
  if (bytes.size() < kMagic.size() + 16) throw IntegrityError("checkpoint: truncated");
  const std::size_t body = bytes.size() - 8;
  if (fnv1a64(bytes.first(body)) != get_u64(bytes, body)) {
    throw IntegrityError("checkpoint: checksum mismatch (corrupt or truncated file)");
  }
  const std::uint64_t meta_len = get_u64(bytes, kMagic.size());
  const std::size_t meta_begin = kMagic.size() + 8;
  if (meta_len > body - meta_begin) throw IntegrityError("checkpoint: metadata length exceeds file");

  Json meta;
  try {
    meta = Json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(meta_begin),
                       bytes.begin() + static_cast<std::ptrdiff_t>(meta_begin + meta_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("checkpoint: bad metadata: ") + e.what());
  }
  try {
    Checkpoint c;
    const Architecture arch = architecture_from(meta.at("architecture"));
    if (!meta.at("pipeline").is_null()) c.pipeline = pipeline_from(meta.at("pipeline"));
    const Json& tj = meta.at("training");
    c.training.algorithm = tj.at("algorithm").get<std::string>();
    c.training.epochs = tj.at("epochs").get<int>();
    c.training.seed = tj.at("seed").get<std::uint64_t>();
    for (const auto& item : tj.at("metrics").items()) c.training.metrics[item.key()] = item.value().get<double>();
    if (tj.contains("key_fingerprint")) {
      const std::string hex = tj.at("key_fingerprint").get<std::string>();
      if (hex.size() != 16 || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
        throw FormatError("checkpoint: malformed key fingerprint");
      }
      c.training.key_fingerprint = std::stoull(hex, nullptr, 16);
    }

    std::vector<Tensor> params;
    std::size_t offset = meta_begin + meta_len;
    for (const Json& sj : meta.at("parameters")) {
      const Shape shape = sj.get<Shape>();
      const std::size_t count = element_count(shape);
      if (count * sizeof(double) > body - offset) throw IntegrityError("checkpoint: parameter data truncated");
      std::vector<double> values(count);
      std::memcpy(values.data(), bytes.data() + offset, count * sizeof(double));
      offset += count * sizeof(double);
      params.emplace_back(shape, std::move(values));
    }
    if (offset != body) throw IntegrityError("checkpoint: trailing bytes after parameters");
    c.model = Model(arch, std::move(params));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_checkpoint(bytes);
}

}  // namespace blindguard
