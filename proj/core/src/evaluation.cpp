#include "blindguard/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "blindguard/errors.hpp"
#include "blindguard/training.hpp"

namespace blindguard {

namespace {

using Json = nlohmann::ordered_json;

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string json_string(std::string_view s) { return Json(std::string(s)).dump(); }

std::string alpha_text(double clean, double attacked) {
  if (clean == 0.0 && attacked == 0.0) return "null";
  return fixed4(alpha_ratio(clean, attacked));
}

std::string sweep_json(const std::vector<SweepRecord>& records, bool by_epsilon) {
  if (records.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SweepRecord& r = records[i];
    out += "    {";
    out += by_epsilon ? "\"epsilon\": " + fixed4(r.epsilon) : "\"batch_size\": " + std::to_string(r.batch_size);
    out += ", \"clean_acc\": " + fixed4(r.clean_acc) + ", \"attack_acc\": " + fixed4(r.attack_acc) +
           ", \"alpha\": " + alpha_text(r.clean_acc, r.attack_acc) + "}";
    out += i + 1 < records.size() ? ",\n" : "\n";
  }
  return out + "  ]";
}

std::string histograms_json(const std::vector<Histogram>& hs) {
  if (hs.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Histogram& h = hs[i];
    out += "    {\"label\": " + json_string(h.label) + ", \"lo\": " + fixed4(h.lo) + ", \"hi\": " + fixed4(h.hi) +
           ", \"mean\": " + fixed4(h.mean) + ", \"std\": " + fixed4(h.stddev) + ", \"counts\": [";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      if (b) out += ", ";
      out += std::to_string(h.counts[b]);
    }
    out += "]}";
    out += i + 1 < hs.size() ? ",\n" : "\n";
  }
  return out + "  ]";
}

std::vector<SweepRecord> sweep_from(const Json& j, bool by_epsilon) {
  std::vector<SweepRecord> out;
  for (const Json& r : j) {
    SweepRecord rec;
    if (by_epsilon) {
      rec.epsilon = r.at("epsilon").get<double>();
    } else {
      rec.batch_size = r.at("batch_size").get<std::size_t>();
    }
    rec.clean_acc = r.at("clean_acc").get<double>();
    rec.attack_acc = r.at("attack_acc").get<double>();
    out.push_back(rec);
  }
  return out;
}

/// Runs one attack on one batch and returns the defender's predictions.
std::vector<int> attack_batch(const Defense& defense, const BlindGate& gate, const Dataset& part,
                              const AttackConfig& cfg, AttackKind kind, std::size_t& attacker_hits) {
  const Model& model = *defense.model;
  const Pipeline* pipeline = defense.pipeline;
  auto deliver_raw = [&](const Tensor& raw) { return model.predict(gate.apply(defense.key, raw).data); };
  auto count_hits = [&](const AdversarialBatch& adv) {
    for (auto s : adv.success) attacker_hits += s;
  };

  if (cfg.mode == ThreatMode::bpda) {
    const AttackerView view = attacker_view(model, gate, defense.key, part);
    const AdversarialBatch adv = bpda_attack(view, part.images, part.labels, cfg);
    count_hits(adv);
    return deliver_raw(adv.realized);
  }
  if (kind == AttackKind::lspga) {
    AdversarialBatch adv;
    if (cfg.mode == ThreatMode::blind) {
      const AttackerView view = attacker_view(model, gate, defense.key, part);
      adv = lspga(view, part.images, part.labels, cfg);
    } else {
      adv = lspga(model, pipeline, part.images, part.labels, cfg);
    }
    count_hits(adv);
    return adv.delivery == Delivery::encoded ? model.predict(adv.encoded.data) : deliver_raw(adv.realized);
  }

  const InputGradient gradient = model_input_gradient(model, pipeline, cfg.mode);
  const Tensor adv = kind == AttackKind::fgsm ? fgsm(gradient, part.images, part.labels, cfg.epsilon)
                                              : pgd_continuous(gradient, part.images, part.labels, cfg);
  const std::vector<int> predicted = deliver_raw(adv);
  for (std::size_t i = 0; i < predicted.size(); ++i) attacker_hits += predicted[i] != part.labels[i] ? 1 : 0;
  return predicted;
}

}  // namespace

double alpha_ratio(double clean, double attacked) {
  if (clean < 0.0 || attacked < 0.0) throw RangeError("alpha_ratio: accuracies must be non-negative");
  if (clean + attacked <= 0.0) throw UndefinedRatioError("alpha_ratio: undefined for clean = attacked = 0");
  return attacked / (clean + attacked) * 100.0;
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::fgsm: return "fgsm";
    case AttackKind::pgd: return "pgd";
    case AttackKind::lspga: return "lspga";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(std::string_view name) {
  if (name == "fgsm") return AttackKind::fgsm;
  if (name == "pgd") return AttackKind::pgd;
  if (name == "lspga") return AttackKind::lspga;
  throw ConfigError("unknown attack '" + std::string(name) + "' (expected fgsm, pgd or lspga)");
}

AttackOutcome evaluate_attack(const Defense& defense, const Dataset& data, const AttackConfig& cfg, AttackKind kind,
                              std::size_t eval_batch_size) {
  if (defense.model == nullptr) throw ContractError("evaluate_attack: no model");
  if (eval_batch_size == 0) throw ConfigError("evaluate_attack: eval_batch_size must be >= 1");
  cfg.validate();
  const BlindGate gate(defense.pipeline ? *defense.pipeline : Pipeline{}, defense.key);

  AttackOutcome out;
  out.examples = data.size();
  if (data.size() == 0) return out;
  std::size_t clean_correct = 0, attacked_correct = 0, attacker_hits = 0;
  std::size_t batch_index = 0;
  for (std::size_t begin = 0; begin < data.size(); begin += eval_batch_size, ++batch_index) {
    const Dataset part = data.slice(begin, eval_batch_size);
    const std::vector<int> clean = defense.model->predict(gate.apply(defense.key, part.images).data);
    AttackConfig batch_cfg = cfg;
    batch_cfg.seed = cfg.seed + 1000003ULL * batch_index;
    const std::vector<int> attacked = attack_batch(defense, gate, part, batch_cfg, kind, attacker_hits);
    for (std::size_t i = 0; i < part.size(); ++i) {
      clean_correct += clean[i] == part.labels[i] ? 1 : 0;
      attacked_correct += attacked[i] == part.labels[i] ? 1 : 0;
    }
  }
  const auto n = static_cast<double>(data.size());
  out.clean_acc = 100.0 * static_cast<double>(clean_correct) / n;
  out.attack_acc = 100.0 * static_cast<double>(attacked_correct) / n;
  out.attacker_success = 100.0 * static_cast<double>(attacker_hits) / n;
  return out;
}

std::vector<SweepRecord> epsilon_sweep(const Defense& defense, const Dataset& data, std::span<const double> epsilons,
                                       const AttackConfig& base, AttackKind kind, std::size_t eval_batch_size) {
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) throw ConfigError("epsilon_sweep: list must be ascending");
  std::vector<SweepRecord> out;
  for (double eps : epsilons) {
    AttackConfig cfg = base;
    cfg.epsilon = eps;
    const AttackOutcome r = evaluate_attack(defense, data, cfg, kind, eval_batch_size);
    out.push_back({eps, eval_batch_size, r.clean_acc, r.attack_acc});
  }
  return out;
}

std::vector<SweepRecord> batch_size_sweep(const Defense& defense, const Dataset& data,
                                          std::span<const std::size_t> sizes, const AttackConfig& cfg,
                                          AttackKind kind) {
  std::vector<SweepRecord> out;
  for (std::size_t size : sizes) {
    if (size == 0) throw ConfigError("batch_size_sweep: sizes must be >= 1");
    const AttackOutcome r = evaluate_attack(defense, data, cfg, kind, size);
    out.push_back({cfg.epsilon, size, r.clean_acc, r.attack_acc});
  }
  return out;
}

std::vector<double> Histogram::edges() const {
  std::vector<double> e(kBins + 1);
  for (std::size_t i = 0; i <= kBins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / kBins;
  return e;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

Histogram pixel_histogram(const Tensor& batch, const Pipeline* after, std::string label) {
  const Tensor values = after != nullptr ? apply_prefix(*after, batch) : batch;
  if (values.empty()) throw DimensionError("pixel_histogram: empty batch");
  Histogram h;
  h.label = std::move(label);
  h.counts.assign(Histogram::kBins, 0);

  const auto [min_it, max_it] = std::minmax_element(values.values().begin(), values.values().end());
  if (*min_it < 0.0 || *max_it > 1.0) {
    h.lo = *min_it;
    h.hi = *max_it;
  }
  const double width = h.hi - h.lo;
  double sum = 0.0;
  for (double v : values.values()) {
    sum += v;
    const double unit = width > 0.0 ? (v - h.lo) / width : 0.0;
    const auto bin = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(unit * Histogram::kBins))),
                              Histogram::kBins - 1);
    ++h.counts[bin];
  }
  const auto n = static_cast<double>(values.size());
  h.mean = sum / n;
  double var = 0.0;
  for (double v : values.values()) var += (v - h.mean) * (v - h.mean);
  h.stddev = std::sqrt(var / n);
  return h;
}

std::optional<double> EvalReport::alpha() const {
  if (clean_acc == 0.0 && attack_acc == 0.0) return std::nullopt;
  return alpha_ratio(clean_acc, attack_acc);
}

std::string render_report(const EvalReport& r, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out = "sweep,epsilon,batch_size,clean_acc,attack_acc,alpha\n";
    auto row = [&](const char* kind, const SweepRecord& s) {
      const std::string alpha = alpha_text(s.clean_acc, s.attack_acc);
      out += std::string(kind) + "," + fixed4(s.epsilon) + "," + std::to_string(s.batch_size) + "," +
             fixed4(s.clean_acc) + "," + fixed4(s.attack_acc) + "," + (alpha == "null" ? "" : alpha) + "\n";
    };
    for (const auto& s : r.epsilon_sweep) row("epsilon", s);
    for (const auto& s : r.batch_sweep) row("batch_size", s);
    return out;
  }
  std::string out = "{\n";
  out += "  \"name\": " + json_string(r.name) + ",\n";
  out += "  \"clean_acc\": " + fixed4(r.clean_acc) + ",\n";
  out += "  \"attack_acc\": " + fixed4(r.attack_acc) + ",\n";
  out += "  \"alpha\": " + alpha_text(r.clean_acc, r.attack_acc) + ",\n";
  out += "  \"config\": " + r.config + ",\n";
  out += "  \"epsilon_sweep\": " + sweep_json(r.epsilon_sweep, true) + ",\n";
  out += "  \"batch_sweep\": " + sweep_json(r.batch_sweep, false) + ",\n";
  out += "  \"histograms\": " + histograms_json(r.histograms) + "\n";
  out += "}\n";
  return out;
}

EvalReport parse_report_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    EvalReport r;
    r.name = j.at("name").get<std::string>();
    r.clean_acc = j.at("clean_acc").get<double>();
    r.attack_acc = j.at("attack_acc").get<double>();
    r.config = j.at("config").dump();
    r.epsilon_sweep = sweep_from(j.at("epsilon_sweep"), true);
    r.batch_sweep = sweep_from(j.at("batch_sweep"), false);
    for (const Json& hj : j.at("histograms")) {
      Histogram h;
      h.label = hj.at("label").get<std::string>();
      h.lo = hj.at("lo").get<double>();
      h.hi = hj.at("hi").get<double>();
      h.mean = hj.at("mean").get<double>();
      h.stddev = hj.at("std").get<double>();
      h.counts = hj.at("counts").get<std::vector<std::uint64_t>>();
      r.histograms.push_back(std::move(h));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path) {
  const std::string text = render_report(report, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report " + path.string());
  out << text;
  if (!out) throw IoError("write failed for report " + path.string());
}

}  // namespace blindguard
