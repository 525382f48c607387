#include "gcl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace gcl {

void ProbeConfig::validate() const {
  if (!(probe_lr > 0.0)) throw std::invalid_argument("probe_lr must be > 0");
  if (probe_epochs < 1) throw std::invalid_argument("probe_epochs must be >= 1");
  if (probe_weight_decay < 0.0) {
    throw std::invalid_argument("probe_weight_decay must be >= 0");
  }
}

std::size_t ProbeModel::predict(const double* row, std::size_t dim) const {
  std::size_t best = 0;
  double best_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < biases.size(); ++c) {
    double logit = biases[c];
    for (std::size_t j = 0; j < dim; ++j) logit += row[j] * weights(j, c);
    if (logit > best_logit) {
      best_logit = logit;
      best = c;
    }
  }
  return best;
}

void EvalReport::finalize() {
  mean = 0.0;
  for (double a : accuracies) mean += a;
  if (!accuracies.empty()) mean /= static_cast<double>(accuracies.size());
  double var = 0.0;
  for (double a : accuracies) var += (a - mean) * (a - mean);
  if (!accuracies.empty()) var /= static_cast<double>(accuracies.size());
  stddev = std::sqrt(var);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = variant;
  j["seeds"] = seeds;
  j["accuracies"] = accuracies;
  j["mean"] = mean;
  j["std"] = stddev;
  j["betas"] = betas;
  return j.dump(2) + "\n";
}

void EvalReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << to_json();
}

DenseMatrix combine_views(const DenseMatrix& z_s, const DenseMatrix& z_f,
                          double beta) {
  if (!z_s.same_shape(z_f)) {
    throw std::invalid_argument("combine_views: shape mismatch");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("combine_views: beta outside [0,1]");
  }
  if (beta == 1.0) return z_s;
  if (beta == 0.0) return z_f;
  // z_f + beta (z_s - z_f): exactly idempotent when the views coincide.
  DenseMatrix out(z_s.rows(), z_s.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = z_f.data()[i] + beta * (z_s.data()[i] - z_f.data()[i]);
  }
  return out;
}

double probe_loss_and_grad(const DenseMatrix& z, const std::vector<std::size_t>& labels,
                           const std::vector<std::size_t>& train_idx,
                           std::size_t num_classes, const ProbeModel& model,
                           double weight_decay, ProbeModel* grad) {
  const std::size_t d = z.cols();
  if (grad) {
    grad->weights = DenseMatrix(d, num_classes);
    grad->biases.assign(num_classes, 0.0);
  }
  const double inv_n = 1.0 / static_cast<double>(train_idx.size());
  double loss = 0.0;
  std::vector<double> logits(num_classes);
  for (std::size_t idx : train_idx) {
    const double* row = z.row_ptr(idx);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < num_classes; ++c) {
      double l = model.biases[c];
      for (std::size_t j = 0; j < d; ++j) l += row[j] * model.weights(j, c);
      logits[c] = l;
      max_logit = std::max(max_logit, l);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      logits[c] = std::exp(logits[c] - max_logit);
      sum += logits[c];
    }
    const std::size_t y = labels[idx];
    loss -= inv_n * std::log(logits[y] / sum);
    if (grad) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double p = logits[c] / sum;
        const double delta = inv_n * (p - (c == y ? 1.0 : 0.0));
        grad->biases[c] += delta;
        for (std::size_t j = 0; j < d; ++j) grad->weights(j, c) += delta * row[j];
      }
    }
  }
  // L2 on weights only.
  double reg = 0.0;
  for (double w : model.weights.data()) reg += w * w;
  loss += 0.5 * weight_decay * reg;
  if (grad) {
    for (std::size_t i = 0; i < grad->weights.data().size(); ++i) {
      grad->weights.data()[i] += weight_decay * model.weights.data()[i];
    }
  }
  return loss;
}

double probe_accuracy(const ProbeModel& model, const DenseMatrix& z,
                      const std::vector<std::size_t>& labels,
                      const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i : idx) {
    if (model.predict(z.row_ptr(i), z.cols()) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

ProbeResult linear_probe(const DenseMatrix& z, const std::vector<std::size_t>& labels,
                         const Split& split, std::size_t num_classes,
                         const ProbeConfig& cfg) {
  cfg.validate();
  if (split.train.empty()) throw std::invalid_argument("linear_probe: empty train split");

  std::vector<bool> class_seen(num_classes, false);
  for (std::size_t i : split.train) class_seen[labels[i]] = true;
  for (std::size_t i : split.test) {
    if (!class_seen[labels[i]]) {
      std::cerr << "warning: class " << labels[i]
                << " appears in test but has no training example\n";
      break;
    }
  }

  ProbeResult res;
  res.model.weights = DenseMatrix(z.cols(), num_classes);
  res.model.biases.assign(num_classes, 0.0);
  ProbeModel grad;
  for (std::size_t e = 0; e < cfg.probe_epochs; ++e) {
    probe_loss_and_grad(z, labels, split.train, num_classes, res.model,
                        cfg.probe_weight_decay, &grad);
    for (std::size_t i = 0; i < res.model.weights.data().size(); ++i) {
      res.model.weights.data()[i] -= cfg.probe_lr * grad.weights.data()[i];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      res.model.biases[c] -= cfg.probe_lr * grad.biases[c];
    }
  }
  res.accuracy = probe_accuracy(res.model, z, labels, split.test);
  return res;
}

double select_beta(const DenseMatrix& z_s, const DenseMatrix& z_f,
                   const std::vector<std::size_t>& labels, const Split& split,
                   std::size_t num_classes, const std::vector<double>& grid,
                   const ProbeConfig& cfg) {
  if (grid.empty()) throw std::invalid_argument("select_beta: empty grid");
  double best_beta = grid.front();
  double best_acc = -1.0;
  for (double beta : grid) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("select_beta: grid value outside [0,1]");
    }
    const DenseMatrix z = combine_views(z_s, z_f, beta);
    ProbeResult pr = linear_probe(z, labels, split, num_classes, cfg);
    const double acc = probe_accuracy(pr.model, z, labels, split.val);
    const bool better =
        acc > best_acc ||
        (acc == best_acc &&
         (std::fabs(beta - 0.5) < std::fabs(best_beta - 0.5) ||
          (std::fabs(beta - 0.5) == std::fabs(best_beta - 0.5) && beta < best_beta)));
    if (better) {
      best_acc = acc;
      best_beta = beta;
    }
  }
  return best_beta;
}

namespace {

struct SeedOutcome {
  double accuracy = 0.0;
  double beta = 0.5;
};

SeedOutcome run_one_seed(const DatasetBundle& dataset, Variant variant,
                         TrainConfig train_cfg, const ProbeConfig& probe_cfg,
                         std::uint64_t seed, const Split& split,
                         const BetaPolicy& beta_policy) {
  train_cfg.seed = seed;
  const TrainResult tr = train(dataset, train_cfg, variant);
  const NormalizedAdjacency adj = normalized_adjacency(dataset.graph, true);
  const DenseMatrix z_s =
      tr.view_a.forward(adj, dataset.features, train_cfg.final_activation);
  const DenseMatrix z_f =
      tr.view_b.forward(adj, dataset.features, train_cfg.final_activation);

  SeedOutcome out;
  out.beta = beta_policy.fixed
                 ? beta_policy.value
                 : select_beta(z_s, z_f, dataset.labels, split,
                               dataset.num_classes, beta_policy.grid, probe_cfg);
  const DenseMatrix z = combine_views(z_s, z_f, out.beta);
  out.accuracy =
      linear_probe(z, dataset.labels, split, dataset.num_classes, probe_cfg).accuracy;
  return out;
}

}  // namespace

EvalReport evaluate_multiseed(const DatasetBundle& dataset,
                              const TrainConfig& train_cfg,
                              const ProbeConfig& probe_cfg,
                              const std::vector<std::uint64_t>& seeds,
                              const BetaPolicy& beta, Variant variant,
                              std::size_t jobs) {
  if (seeds.empty()) throw std::invalid_argument("evaluate_multiseed: no seeds");
  if (dataset.splits.empty()) {
    throw std::invalid_argument("evaluate_multiseed: dataset has no splits");
  }
  probe_cfg.validate();

  std::vector<SeedOutcome> outcomes(seeds.size());
  auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < seeds.size(); i += stride) {
      const Split& split = dataset.splits[i % dataset.splits.size()];
      outcomes[i] =
          run_one_seed(dataset, variant, train_cfg, probe_cfg, seeds[i], split, beta);
    }
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    const std::size_t n = std::min<std::size_t>(jobs, seeds.size());
    threads.reserve(n);
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker, t, n);
    for (auto& th : threads) th.join();
  }

  EvalReport report;
  report.variant = variant_name(variant);
  report.seeds = seeds;
  for (const auto& o : outcomes) {
    report.accuracies.push_back(o.accuracy);
    report.betas.push_back(o.beta);
  }
  report.finalize();
  return report;
}

EvalReport ablation_run(const DatasetBundle& dataset, Variant variant,
                        const TrainConfig& train_cfg, const ProbeConfig& probe_cfg,
                        const std::vector<std::uint64_t>& seeds,
                        const BetaPolicy& beta, std::size_t jobs) {
  return evaluate_multiseed(dataset, train_cfg, probe_cfg, seeds, beta, variant, jobs);
}

}  // namespace gcl
