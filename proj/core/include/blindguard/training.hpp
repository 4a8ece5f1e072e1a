#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "blindguard/attacks.hpp"
#include "blindguard/dataset.hpp"
#include "blindguard/model.hpp"
#include "blindguard/preprocessing.hpp"

namespace blindguard {

struct TrainConfig {
  int epochs = 5;
  std::size_t batch_size = 100;
  double lr = 0.01;
  double momentum = 0.9;
  /// Fraction of each batch replaced by LS-PGA examples; 0 disables adversarial training.
  double adv_mix = 0.0;
  AttackConfig attack;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;      // mean training loss
  double accuracy = 0.0;  // percent, on the (possibly mixed) training batches
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

/// SGD with classical momentum: v = m v - lr g; p += v.
class Sgd {
 public:
  Sgd(double lr, double momentum) : lr_(lr), momentum_(momentum) {}
  void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads);

 private:
  double lr_;
  double momentum_;
  std::vector<Tensor> velocity_;
};

/// Called after every epoch.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Shuffles with cfg.seed each epoch, encodes each batch with `pipeline`
/// (batch statistics of that training batch) and takes one SGD step per batch.
/// Raises TrainingError carrying the epoch index if the loss is not finite.
TrainHistory train(Model& model, const Dataset& data, const Pipeline* pipeline, const TrainConfig& cfg,
                   const EpochCallback& on_epoch = {});

/// One SGD step on `batch` in which ceil(adv_mix * n) leading examples are
/// replaced by full white-box LS-PGA examples against the current parameters.
/// Returns the mean loss of the mixed batch before the step.
double adversarial_train_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const int> labels,
                              const Pipeline* pipeline, const TrainConfig& cfg, std::uint64_t step_seed);

/// The model input for a training batch: the pipeline output, or the batch itself.
Tensor encode_batch(const Pipeline* pipeline, const Tensor& batch);

/// Top-1 accuracy in percent over consecutive batches of `eval_batch_size`;
/// with a pipeline every batch is normalised with its own statistics.
double evaluate_accuracy(const Model& model, const Dataset& data, const Pipeline* pipeline,
                         std::size_t eval_batch_size = 100);

}  // namespace blindguard
