#include "blindguard/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

struct StepResult {
  double loss = 0.0;
  std::size_t correct = 0;
};

StepResult sgd_step(Model& model, Sgd& optimizer, const Tensor& input, std::span<const int> labels) {
  Graph graph;
  const std::vector<Var> params = model.bind(graph, true);
  Var logits = model.forward(graph.constant(input), params);
  Var loss = softmax_cross_entropy(logits, labels, Reduction::mean);
  graph.backward(loss);

  StepResult r{loss.value().item(), 0};
  const std::vector<int> predicted = argmax_rows(logits.value());
  for (std::size_t i = 0; i < predicted.size(); ++i) r.correct += predicted[i] == labels[i] ? 1 : 0;
  if (!std::isfinite(r.loss)) return r;

  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (Var p : params) grads.push_back(p.grad());
  optimizer.step(model.parameters(), grads);
  return r;
}

/// Model input for a mixed batch: adversarial rows for the first `n_adv` examples.
Tensor mixed_input(const Model& model, const Tensor& batch, std::span<const int> labels, const Pipeline* pipeline,
                   std::size_t n_adv, const AttackConfig& attack) {
  Tensor input = encode_batch(pipeline, batch);
  if (n_adv == 0) return input;
  AttackConfig cfg = attack;
  cfg.mode = ThreatMode::full_white_box;
  const Tensor head = batch.slice_rows(0, n_adv);
  const AdversarialBatch adv = lspga(model, pipeline, head, labels.subspan(0, n_adv), cfg);
  const Tensor crafted = adv.delivery == Delivery::encoded ? adv.encoded.data : encode_batch(pipeline, adv.realized);
  std::copy(crafted.values().begin(), crafted.values().end(), input.data());
  return input;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must lie in [0, 1)");
  if (!(adv_mix >= 0.0 && adv_mix <= 1.0)) throw ConfigError("train: adv_mix must lie in [0, 1]");
  if (adv_mix > 0.0) attack.validate();
}

void Sgd::step(std::vector<Tensor>& params, const std::vector<Tensor>& grads) {
  if (params.size() != grads.size()) throw DimensionError("Sgd::step: parameter/gradient count mismatch");
  if (velocity_.empty()) {
    for (const Tensor& p : params) velocity_.emplace_back(p.shape());
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    Tensor& v = velocity_[t];
    Tensor& p = params[t];
    const Tensor& g = grads[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = momentum_ * v[i] - lr_ * g[i];
      p[i] += v[i];
    }
  }
}

Tensor encode_batch(const Pipeline* pipeline, const Tensor& batch) {
  if (pipeline == nullptr || pipeline->empty()) return batch;
  return pipeline_apply(*pipeline, batch).data;
}

double adversarial_train_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const int> labels,
                              const Pipeline* pipeline, const TrainConfig& cfg, std::uint64_t step_seed) {
  const std::size_t n = labels.size();
  const auto n_adv = static_cast<std::size_t>(std::ceil(cfg.adv_mix * static_cast<double>(n)));
  AttackConfig attack = cfg.attack;
  attack.seed = step_seed;
  const Tensor input = mixed_input(model, batch, labels, pipeline, std::min(n_adv, n), attack);
  return sgd_step(model, optimizer, input, labels).loss;
}

TrainHistory train(Model& model, const Dataset& data, const Pipeline* pipeline, const TrainConfig& cfg,
                   const EpochCallback& on_epoch) {
  cfg.validate();
  if (pipeline != nullptr) pipeline->validate();
  for (int label : data.labels) {
    if (label < 0 || label >= static_cast<int>(model.architecture().classes)) {
      throw IndexError("train: label " + std::to_string(label) + " out of range");
    }
  }
  Sgd optimizer(cfg.lr, cfg.momentum);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0, batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const Tensor batch = gather_rows(data.images, idx);
      std::vector<int> labels;
      labels.reserve(idx.size());
      for (std::size_t i : idx) labels.push_back(data.labels[i]);

      const std::size_t n_adv =
          std::min(idx.size(), static_cast<std::size_t>(std::ceil(cfg.adv_mix * static_cast<double>(idx.size()))));
      AttackConfig attack = cfg.attack;
      attack.seed = cfg.attack.seed + cfg.seed * 1000003ULL + step;
      const Tensor input = mixed_input(model, batch, labels, pipeline, n_adv, attack);
      const StepResult r = sgd_step(model, optimizer, input, labels);
      if (!std::isfinite(r.loss)) {
        throw TrainingError("training diverged (non-finite loss) in epoch " + std::to_string(epoch), epoch);
      }
      loss_sum += r.loss;
      correct += r.correct;
      seen += idx.size();
      ++batches;
      ++step;
    }
    EpochRecord record{epoch, batches ? loss_sum / static_cast<double>(batches) : 0.0,
                       seen ? 100.0 * static_cast<double>(correct) / static_cast<double>(seen) : 0.0};
    history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return history;
}

double evaluate_accuracy(const Model& model, const Dataset& data, const Pipeline* pipeline,
                         std::size_t eval_batch_size) {
  if (eval_batch_size == 0) throw ConfigError("evaluate_accuracy: eval_batch_size must be >= 1");
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < data.size(); begin += eval_batch_size) {
    const std::size_t end = std::min(data.size(), begin + eval_batch_size);
    const std::vector<int> predicted = model.predict(encode_batch(pipeline, data.images.slice_rows(begin, end)));
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.labels[begin + i] ? 1 : 0;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace blindguard
