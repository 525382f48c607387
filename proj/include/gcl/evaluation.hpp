#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/matrix.hpp"
#include "gcl/training.hpp"

namespace gcl {

struct ProbeConfig {
  double probe_lr = 0.01;
  std::size_t probe_epochs = 300;
  double probe_weight_decay = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

// Multinomial logistic regression head: logits = z W + b.
struct ProbeModel {
  DenseMatrix weights;         // d x C
  std::vector<double> biases;  // C

  // Argmax with ties broken toward the lowest class id.
  std::size_t predict(const double* row, std::size_t dim) const;
};

struct ProbeResult {
  double accuracy = 0.0;
  ProbeModel model;
};

struct EvalReport {
  std::string variant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  std::vector<double> betas;
  double mean = 0.0;
  double stddev = 0.0;  // population formula

  void finalize();
  std::string to_json() const;
  void write_json(const std::string& path) const;
};

struct BetaPolicy {
  bool fixed = false;
  double value = 0.5;
  std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                              0.6, 0.7, 0.8, 0.9, 1.0};
};

// Z = beta * z_s + (1 - beta) * z_f; beta must lie in [0, 1].
DenseMatrix combine_views(const DenseMatrix& z_s, const DenseMatrix& z_f,
                          double beta);

// Softmax cross-entropy loss (L2-regularized, mean over train indices) and
// its gradient at the given model. Exposed for gradient checking.
double probe_loss_and_grad(const DenseMatrix& z, const std::vector<std::size_t>& labels,
                           const std::vector<std::size_t>& train_idx,
                           std::size_t num_classes, const ProbeModel& model,
                           double weight_decay, ProbeModel* grad);

// Trains the probe full-batch on split.train, reports accuracy on split.test.
ProbeResult linear_probe(const DenseMatrix& z, const std::vector<std::size_t>& labels,
                         const Split& split, std::size_t num_classes,
                         const ProbeConfig& cfg);

// Accuracy of an already-trained probe on the given indices.
double probe_accuracy(const ProbeModel& model, const DenseMatrix& z,
                      const std::vector<std::size_t>& labels,
                      const std::vector<std::size_t>& idx);

// Grid value maximizing validation accuracy; ties broken toward 0.5,
// then toward smaller beta.
double select_beta(const DenseMatrix& z_s, const DenseMatrix& z_f,
                   const std::vector<std::size_t>& labels, const Split& split,
                   std::size_t num_classes, const std::vector<double>& grid,
                   const ProbeConfig& cfg);

// Per seed: train, embed, choose beta on validation, probe accuracy on test.
// Seed i uses split i % splits.size().
EvalReport evaluate_multiseed(const DatasetBundle& dataset,
                              const TrainConfig& train_cfg,
                              const ProbeConfig& probe_cfg,
                              const std::vector<std::uint64_t>& seeds,
                              const BetaPolicy& beta = {},
                              Variant variant = Variant::GcnMlp,
                              std::size_t jobs = 1);

EvalReport ablation_run(const DatasetBundle& dataset, Variant variant,
                        const TrainConfig& train_cfg, const ProbeConfig& probe_cfg,
                        const std::vector<std::uint64_t>& seeds,
                        const BetaPolicy& beta = {}, std::size_t jobs = 1);

}  // namespace gcl
