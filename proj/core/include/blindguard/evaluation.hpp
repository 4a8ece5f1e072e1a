#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindguard/attacks.hpp"
#include "blindguard/blind.hpp"
#include "blindguard/dataset.hpp"
#include "blindguard/model.hpp"
#include "blindguard/preprocessing.hpp"

namespace blindguard {

/// Attacked data accuracy ratio y / (x + y) * 100 for clean accuracy x and
/// attacked accuracy y (both percent). UndefinedRatioError when x = y = 0,
/// RangeError for negative inputs.
double alpha_ratio(double clean, double attacked);

enum class AttackKind { fgsm, pgd, lspga };
std::string_view to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view name);

/// The defender's side of an evaluation: a model, the pipeline in front of it
/// (nullptr for an undefended model) and the key gating that pipeline.
struct Defense {
  const Model* model = nullptr;
  const Pipeline* pipeline = nullptr;
  BlindKey key;
};

struct AttackOutcome {
  double clean_acc = 0.0;
  double attack_acc = 0.0;
  double attacker_success = 0.0;  // percent of examples the attacker believed misclassified
  std::size_t examples = 0;
};

/// Clean and attacked top-1 accuracy over consecutive batches of
/// `eval_batch_size`. Each batch is attacked on its own (seed cfg.seed plus a
/// per-batch offset) and delivered to the defender according to cfg.mode:
/// full white-box examples go straight to the model when they are encodings,
/// everything else passes the key gate as a raw image. BPDA mode runs
/// bpda_attack regardless of `kind`.
AttackOutcome evaluate_attack(const Defense& defense, const Dataset& data, const AttackConfig& cfg,
                              AttackKind kind = AttackKind::lspga, std::size_t eval_batch_size = 100);

struct SweepRecord {
  double epsilon = 0.0;
  std::size_t batch_size = 0;
  double clean_acc = 0.0;
  double attack_acc = 0.0;
};

/// One record per epsilon (which must be sorted ascending), every other
/// attack parameter fixed.
std::vector<SweepRecord> epsilon_sweep(const Defense& defense, const Dataset& data, std::span<const double> epsilons,
                                       const AttackConfig& base, AttackKind kind = AttackKind::lspga,
                                       std::size_t eval_batch_size = 100);

/// One record per evaluation batch size; batch statistics are recomputed per size.
std::vector<SweepRecord> batch_size_sweep(const Defense& defense, const Dataset& data,
                                          std::span<const std::size_t> sizes, const AttackConfig& cfg,
                                          AttackKind kind = AttackKind::lspga);

struct Histogram {
  static constexpr std::size_t kBins = 256;
  std::string label;
  /// Range mapped onto the bins: [0, 1], or the data's min/max when values fall outside [0, 1].
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;
  double mean = 0.0;
  double stddev = 0.0;

  std::vector<double> edges() const;
  std::uint64_t total() const;
};

/// Histogram of `batch` after the prefix of `after` (stages before quantize),
/// or of the batch itself. Mean/std describe the unbinned values.
Histogram pixel_histogram(const Tensor& batch, const Pipeline* after = nullptr, std::string label = "");

struct EvalReport {
  std::string name;
  double clean_acc = 0.0;
  double attack_acc = 0.0;
  /// Resolved configuration as compact JSON text (never contains the key).
  std::string config = "{}";
  std::vector<SweepRecord> epsilon_sweep;
  std::vector<SweepRecord> batch_sweep;
  std::vector<Histogram> histograms;

  /// alpha_ratio(clean_acc, attack_acc); nullopt when undefined.
  std::optional<double> alpha() const;
};

enum class ReportFormat { json, csv };

/// Fixed field order, floats with four decimals. CSV holds one row per sweep record.
std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport parse_report_json(std::string_view text);
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace blindguard
