// Batch front end: every subcommand reads one JSON config and writes its
// artifacts into an output directory.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcl/evaluation.hpp"
#include "gcl/graph.hpp"
#include "gcl/noise_lab.hpp"
#include "gcl/robustness.hpp"
#include "gcl/synth.hpp"
#include "gcl/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::size_t jobs = 1;
  std::optional<std::string> out_override;
};

json load_config(const Options& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot open config: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  return j;
}

fs::path out_dir(const json& cfg, const Options& opt) {
  std::string dir = opt.out_override ? *opt.out_override
                                     : cfg.value("out", std::string("out"));
  fs::create_directories(dir);
  return dir;
}

gcl::CsbmConfig csbm_from_json(const json& j) {
  gcl::CsbmConfig c;
  c.num_nodes = j.value("num_nodes", c.num_nodes);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.intra_class_edge_prob = j.value("p_in", c.intra_class_edge_prob);
  c.inter_class_edge_prob = j.value("p_out", c.inter_class_edge_prob);
  c.feature_signal = j.value("feature_signal", c.feature_signal);
  c.feature_noise_std = j.value("feature_noise_std", c.feature_noise_std);
  c.seed = j.value("seed", c.seed);
  c.train_ratio = j.value("train_ratio", c.train_ratio);
  c.val_ratio = j.value("val_ratio", c.val_ratio);
  c.test_ratio = j.value("test_ratio", c.test_ratio);
  return c;
}

gcl::DatasetBundle load_bundle(const json& cfg) {
  if (!cfg.contains("dataset")) throw ConfigError("config missing 'dataset'");
  const json& d = cfg["dataset"];
  const bool has_paths = d.contains("paths");
  const bool has_synth = d.contains("synthetic");
  if (has_paths == has_synth) {
    throw ConfigError("dataset must have exactly one of 'paths' or 'synthetic'");
  }
  gcl::DatasetBundle ds;
  if (has_paths) {
    const json& p = d["paths"];
    for (const char* key : {"edges", "features", "labels", "splits"}) {
      if (!p.contains(key)) throw ConfigError(std::string("dataset.paths missing ") + key);
    }
    gcl::LoadStats stats;
    ds = gcl::load_dataset(p["edges"], p["features"], p["labels"], p["splits"], &stats);
    if (stats.dropped_self_loops || stats.deduplicated_edges) {
      std::cerr << "loader: dropped " << stats.dropped_self_loops
                << " self-loops, deduplicated " << stats.deduplicated_edges
                << " edges\n";
    }
  } else {
    ds = gcl::generate_csbm(csbm_from_json(d["synthetic"]));
  }
  if (d.value("row_normalize", false)) {
    ds.features = gcl::row_normalize_features(ds.features);
  }
  return ds;
}

gcl::TrainConfig train_from_json(const json& cfg, const Options& opt) {
  gcl::TrainConfig t;
  if (cfg.contains("train")) {
    const json& j = cfg["train"];
    t.epochs = j.value("epochs", t.epochs);
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.weight_decay = j.value("weight_decay", t.weight_decay);
    t.seed = j.value("seed", t.seed);
    t.hidden_dim = j.value("hidden_dim", t.hidden_dim);
    t.gcn_layers = j.value("gcn_layers", t.gcn_layers);
    t.mlp_layers = j.value("mlp_layers", t.mlp_layers);
    t.final_activation = j.value("final_activation", t.final_activation);
  }
  if (opt.seed_override) t.seed = *opt.seed_override;
  try {
    t.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return t;
}

gcl::ProbeConfig probe_from_json(const json& cfg) {
  gcl::ProbeConfig p;
  if (cfg.contains("probe")) {
    const json& j = cfg["probe"];
    p.probe_lr = j.value("lr", p.probe_lr);
    p.probe_epochs = j.value("epochs", p.probe_epochs);
    p.probe_weight_decay = j.value("weight_decay", p.probe_weight_decay);
    p.seed = j.value("seed", p.seed);
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p;
}

gcl::BetaPolicy beta_from_json(const json& cfg) {
  gcl::BetaPolicy b;
  if (cfg.contains("beta")) {
    const json& j = cfg["beta"];
    if (j.contains("fixed")) {
      b.fixed = true;
      b.value = j["fixed"];
      if (!(b.value >= 0.0 && b.value <= 1.0)) {
        throw ConfigError("beta.fixed outside [0,1]");
      }
    } else if (j.contains("grid")) {
      b.grid = j["grid"].get<std::vector<double>>();
      if (b.grid.empty()) throw ConfigError("beta.grid empty");
    }
  }
  return b;
}

std::vector<std::uint64_t> seeds_from_json(const json& cfg, const Options& opt) {
  std::vector<std::uint64_t> seeds =
      cfg.value("seeds", std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  if (opt.seed_override) seeds = {*opt.seed_override};
  if (seeds.empty()) throw ConfigError("'seeds' must be nonempty");
  return seeds;
}

int cmd_train(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);
  const gcl::TrainConfig tc = train_from_json(cfg, opt);

  const gcl::TrainResult res = gcl::train(ds, tc, gcl::Variant::GcnMlp);
  gcl::save_checkpoint((out / "checkpoint.bin").string(), res.view_a.gcn,
                       res.view_b.mlp);
  res.trace.write_csv((out / "loss_trace.csv").string());
  std::cout << "final loss: " << res.trace.loss.back() << "\n";
  return 0;
}

int cmd_eval(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);
  const gcl::EvalReport report = gcl::evaluate_multiseed(
      ds, train_from_json(cfg, opt), probe_from_json(cfg), seeds_from_json(cfg, opt),
      beta_from_json(cfg), gcl::Variant::GcnMlp, opt.jobs);
  report.write_json((out / "eval_report.json").string());
  std::cout << report.variant << " mean " << report.mean << " +/- " << report.stddev
            << "\n";
  return 0;
}

int cmd_ablate(const Options& opt, const std::string& variant_str) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);
  gcl::Variant variant;
  try {
    variant = gcl::variant_from_string(variant_str);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const gcl::EvalReport report = gcl::ablation_run(
      ds, variant, train_from_json(cfg, opt), probe_from_json(cfg),
      seeds_from_json(cfg, opt), beta_from_json(cfg), opt.jobs);
  report.write_json((out / ("ablation_" + report.variant + ".json")).string());
  std::cout << report.variant << " mean " << report.mean << " +/- " << report.stddev
            << "\n";
  return 0;
}

int cmd_analyze(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);

  std::size_t k_max = 4, bins = 20, eig_cap = gcl::kEigDefaultCap;
  bool spectral = true, with_self_loops = false;
  if (cfg.contains("analyze")) {
    const json& j = cfg["analyze"];
    k_max = j.value("k_max", k_max);
    bins = j.value("bins", bins);
    spectral = j.value("spectral", spectral);
    with_self_loops = j.value("with_self_loops", with_self_loops);
    eig_cap = j.value("eig_cap", eig_cap);
  }
  if (spectral && ds.graph.num_nodes > eig_cap) {
    throw ConfigError("spectral analysis requested but N=" +
                      std::to_string(ds.graph.num_nodes) +
                      " exceeds the eigensolver cap " + std::to_string(eig_cap) +
                      "; disable 'analyze.spectral' or raise 'analyze.eig_cap'");
  }

  const gcl::NormalizedAdjacency adj =
      gcl::normalized_adjacency(ds.graph, with_self_loops);
  const gcl::NoiseReport rep =
      gcl::noise_report(ds.features, ds.labels, ds.num_classes, adj, k_max, bins);
  rep.write_json((out / "noise_report.json").string());
  rep.correlation_histogram.write_csv((out / "correlation_histogram.csv").string());
  if (spectral) {
    const gcl::SpectralReport srep = gcl::spectral_ek(
        ds.features, ds.labels, ds.num_classes, adj, k_max, eig_cap);
    srep.write_json((out / "spectral_report.json").string());
    std::cout << "spectral/direct max deviation: " << srep.max_deviation << "\n";
  }
  return 0;
}

int cmd_synth(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  if (!cfg.contains("dataset") || !cfg["dataset"].contains("synthetic")) {
    throw ConfigError("synth requires dataset.synthetic");
  }
  gcl::CsbmConfig c = csbm_from_json(cfg["dataset"]["synthetic"]);
  if (opt.seed_override) c.seed = *opt.seed_override;
  const gcl::DatasetBundle ds = gcl::generate_csbm(c);
  gcl::save_dataset(ds, (out / "edges.txt").string(), (out / "features.csv").string(),
                    (out / "labels.txt").string(), (out / "splits.json").string());
  std::cout << "nodes " << ds.graph.num_nodes << " edges " << ds.graph.num_edges()
            << " homophily "
            << (ds.graph.num_edges() ? gcl::edge_homophily(ds.graph, ds.labels) : 0.0)
            << "\n";
  return 0;
}

int cmd_attack(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);
  const gcl::TrainConfig tc = train_from_json(cfg, opt);
  const gcl::ProbeConfig pc = probe_from_json(cfg);
  const gcl::BetaPolicy bp = beta_from_json(cfg);
  const std::vector<std::uint64_t> seeds = seeds_from_json(cfg, opt);

  std::vector<double> rates = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25};
  std::vector<std::string> variants = {"gcn-mlp"};
  if (cfg.contains("attack")) {
    rates = cfg["attack"].value("rates", rates);
    variants = cfg["attack"].value("variants", variants);
  }

  std::ofstream csv(out / "robustness.csv");
  csv.precision(17);
  csv << "rate,variant,mean_acc,std_acc\n";
  for (const std::string& vs : variants) {
    const gcl::Variant variant = gcl::variant_from_string(vs);
    for (double rate : rates) {
      std::vector<double> accs;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        gcl::TrainConfig tcs = tc;
        tcs.seed = seeds[si];
        const gcl::TrainResult tr = gcl::train(ds, tcs, variant);
        const gcl::Split& split = ds.splits[si % ds.splits.size()];

        const gcl::NormalizedAdjacency adj = gcl::normalized_adjacency(ds.graph, true);
        const gcl::DenseMatrix zs =
            tr.view_a.forward(adj, ds.features, tc.final_activation);
        const gcl::DenseMatrix zf =
            tr.view_b.forward(adj, ds.features, tc.final_activation);
        const double beta = bp.fixed
                                ? bp.value
                                : gcl::select_beta(zs, zf, ds.labels, split,
                                                   ds.num_classes, bp.grid, pc);

        gcl::AttackConfig ac;
        ac.perturbation_rate = rate;
        ac.seed = seeds[si] + 1000003;
        const gcl::Graph attacked = gcl::random_edge_attack(ds.graph, ac);
        accs.push_back(gcl::evasion_eval(tr.view_a, tr.view_b, ds, attacked, beta, pc,
                                         split, tc.final_activation));
      }
      double mean = 0.0;
      for (double a : accs) mean += a;
      mean /= static_cast<double>(accs.size());
      double var = 0.0;
      for (double a : accs) var += (a - mean) * (a - mean);
      var /= static_cast<double>(accs.size());
      csv << rate << ',' << vs << ',' << mean << ',' << std::sqrt(var) << '\n';
      std::cout << vs << " rate " << rate << " mean acc " << mean << "\n";
    }
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const json cfg = load_config(opt);
  const fs::path out = out_dir(cfg, opt);
  const gcl::DatasetBundle ds = load_bundle(cfg);
  const gcl::TrainConfig tc = train_from_json(cfg, opt);
  const gcl::ProbeConfig pc = probe_from_json(cfg);
  const gcl::BetaPolicy bp = beta_from_json(cfg);
  const std::vector<std::uint64_t> seeds = seeds_from_json(cfg, opt);

  std::string axis = "hidden_dim";
  std::vector<std::size_t> values = {32, 64, 128, 256};
  if (cfg.contains("sweep")) {
    axis = cfg["sweep"].value("axis", axis);
    values = cfg["sweep"].value("values", values);
  }
  if (axis != "hidden_dim" && axis != "gcn_layers") {
    throw ConfigError("sweep.axis must be 'hidden_dim' or 'gcn_layers'");
  }

  std::ofstream csv(out / "sweep.csv");
  csv.precision(17);
  csv << axis << ",mean_acc,std_acc\n";
  for (std::size_t v : values) {
    gcl::TrainConfig t = tc;
    if (axis == "hidden_dim") {
      t.hidden_dim = v;
    } else {
      t.gcn_layers = v;
    }
    const gcl::EvalReport rep = gcl::evaluate_multiseed(
        ds, t, pc, seeds, bp, gcl::Variant::GcnMlp, opt.jobs);
    csv << v << ',' << rep.mean << ',' << rep.stddev << '\n';
    std::cout << axis << "=" << v << " mean acc " << rep.mean << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph contrastive learning toolkit"};
  app.require_subcommand(1);

  Options opt;
  std::string ablate_variant = "gcn-mlp";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { opt.seed_override = s; }, "seed override");
    sub->add_option("--jobs", opt.jobs, "seed-level parallelism (default 1)");
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& s) { opt.out_override = s; },
        "output directory override");
  };

  CLI::App* train = app.add_subcommand("train", "train a GCN-MLP model");
  CLI::App* eval = app.add_subcommand("eval", "multi-seed evaluation with beta selection");
  CLI::App* ablate = app.add_subcommand("ablate", "run an encoder-pair variant");
  ablate->add_option("--variant", ablate_variant, "gcn-mlp|gcn-gcn|mlp-mlp");
  CLI::App* analyze = app.add_subcommand("analyze", "noise and spectral diagnostics");
  CLI::App* synth = app.add_subcommand("synth", "generate and serialize a CSBM dataset");
  CLI::App* attack = app.add_subcommand("attack", "random-edge robustness sweep");
  CLI::App* sweep = app.add_subcommand("sweep", "grid over hidden_dim or gcn_layers");
  for (CLI::App* sub : {train, eval, ablate, analyze, synth, attack, sweep}) {
    add_common(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (ablate->parsed()) return cmd_ablate(opt, ablate_variant);
    if (analyze->parsed()) return cmd_analyze(opt);
    if (synth->parsed()) return cmd_synth(opt);
    if (attack->parsed()) return cmd_attack(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gcl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const gcl::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const gcl::ValidationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
