#include "gcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gcl {

Graph Graph::build(std::size_t num_nodes,
                   std::vector<std::pair<std::size_t, std::size_t>> edges,
                   std::vector<double> weights) {
  if (weights.empty()) weights.assign(edges.size(), 1.0);
  if (weights.size() != edges.size()) {
    throw ValidationError("Graph: weight count does not match edge count");
  }
  for (auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw ValidationError("Graph: edge endpoint out of range");
    }
    if (u == v) throw ValidationError("Graph: self-loop in edge list");
    if (u > v) std::swap(u, v);
  }
  // Canonical order, duplicates rejected.
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  Graph g;
  g.num_nodes = num_nodes;
  g.edges.reserve(edges.size());
  g.edge_weights.reserve(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && edges[order[k]] == edges[order[k - 1]]) {
      throw ValidationError("Graph: duplicate edge");
    }
    g.edges.push_back(edges[order[k]]);
    g.edge_weights.push_back(weights[order[k]]);
  }

  std::vector<std::size_t> r, c;
  std::vector<double> v;
  r.reserve(2 * g.edges.size());
  c.reserve(2 * g.edges.size());
  v.reserve(2 * g.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    r.push_back(g.edges[k].first);
    c.push_back(g.edges[k].second);
    v.push_back(g.edge_weights[k]);
    r.push_back(g.edges[k].second);
    c.push_back(g.edges[k].first);
    v.push_back(g.edge_weights[k]);
  }
  g.adjacency = SparseMatrix::from_triplets(num_nodes, num_nodes, r, c, v);
  return g;
}

void DatasetBundle::validate() const {
  const std::size_t n = graph.num_nodes;
  if (features.rows() != n) {
    throw ValidationError("feature matrix has " + std::to_string(features.rows()) +
                          " rows, expected " + std::to_string(n));
  }
  features.check_finite("features");
  if (labels.size() != n) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " != num_nodes " + std::to_string(n));
  }
  for (std::size_t l : labels) {
    if (l >= num_classes) {
      throw ValidationError("label " + std::to_string(l) + " out of range [0," +
                            std::to_string(num_classes) + ")");
    }
  }
  for (const auto& sp : splits) {
    std::set<std::size_t> seen;
    for (const auto* part : {&sp.train, &sp.val, &sp.test}) {
      for (std::size_t idx : *part) {
        if (idx >= n) {
          throw ValidationError("split '" + sp.name + "' index " +
                                std::to_string(idx) + " >= N");
        }
        if (!seen.insert(idx).second) {
          throw ValidationError("split '" + sp.name + "' has overlapping indices");
        }
      }
    }
  }
}

namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

}  // namespace

DatasetBundle load_dataset(const std::string& edge_path,
                           const std::string& feature_path,
                           const std::string& label_path,
                           const std::string& split_path, LoadStats* stats) {
  LoadStats local;

  // Features first: they fix N.
  DenseMatrix features;
  {
    std::ifstream in(feature_path);
    if (!in) throw ValidationError("cannot open feature file: " + feature_path);
    std::vector<double> data;
    std::size_t rows = 0, cols = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::size_t ncols = 0;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        try {
          std::size_t pos = 0;
          const double val = std::stod(cell, &pos);
          data.push_back(val);
        } catch (const std::exception&) {
          throw ParseError(feature_path, lineno, "bad float '" + cell + "'");
        }
        ++ncols;
      }
      if (rows == 0) {
        cols = ncols;
      } else if (ncols != cols) {
        throw ParseError(feature_path, lineno, "row has " + std::to_string(ncols) +
                                                   " columns, expected " +
                                                   std::to_string(cols));
      }
      ++rows;
    }
    features = DenseMatrix(rows, cols, std::move(data));
  }
  const std::size_t n = features.rows();

  // Edge list: symmetrize, dedup, drop self-loops.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> weights;
  {
    std::ifstream in(edge_path);
    if (!in) throw ValidationError("cannot open edge file: " + edge_path);
    std::map<std::pair<std::size_t, std::size_t>, double> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank_or_comment(line)) continue;
      std::istringstream ss(line);
      long long u, v;
      if (!(ss >> u >> v)) throw ParseError(edge_path, lineno, "expected two endpoints");
      double w = 1.0;
      ss >> w;  // optional third column
      if (u < 0 || v < 0) throw ParseError(edge_path, lineno, "negative node id");
      auto a = static_cast<std::size_t>(u);
      auto b = static_cast<std::size_t>(v);
      if (a >= n || b >= n) {
        throw ValidationError(edge_path + ":" + std::to_string(lineno) +
                              ": node id >= N=" + std::to_string(n));
      }
      if (a == b) {
        ++local.dropped_self_loops;
        continue;
      }
      if (a > b) std::swap(a, b);
      auto [it, inserted] = seen.emplace(std::make_pair(a, b), w);
      if (!inserted) ++local.deduplicated_edges;
    }
    for (const auto& [e, w] : seen) {
      edges.push_back(e);
      weights.push_back(w);
    }
  }

  std::vector<std::size_t> labels;
  {
    std::ifstream in(label_path);
    if (!in) throw ValidationError("cannot open label file: " + label_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank_or_comment(line)) continue;
      std::istringstream ss(line);
      long long l;
      if (!(ss >> l) || l < 0) throw ParseError(label_path, lineno, "bad label");
      labels.push_back(static_cast<std::size_t>(l));
    }
  }

  std::vector<Split> splits;
  {
    std::ifstream in(split_path);
    if (!in) throw ValidationError("cannot open split file: " + split_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ParseError(split_path, 0, e.what());
    }
    if (!j.contains("splits") || !j["splits"].is_array()) {
      throw ValidationError(split_path + ": missing 'splits' array");
    }
    for (const auto& js : j["splits"]) {
      Split sp;
      sp.name = js.value("name", "");
      sp.train = js.value("train", std::vector<std::size_t>{});
      sp.val = js.value("val", std::vector<std::size_t>{});
      sp.test = js.value("test", std::vector<std::size_t>{});
      splits.push_back(std::move(sp));
    }
  }

  DatasetBundle ds;
  ds.graph = Graph::build(n, std::move(edges), std::move(weights));
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.splits = std::move(splits);
  ds.num_classes =
      ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  ds.validate();
  if (stats) *stats = local;
  return ds;
}

void save_dataset(const DatasetBundle& ds, const std::string& edge_path,
                  const std::string& feature_path, const std::string& label_path,
                  const std::string& split_path) {
  {
    std::ofstream out(edge_path);
    for (std::size_t k = 0; k < ds.graph.edges.size(); ++k) {
      out << ds.graph.edges[k].first << ' ' << ds.graph.edges[k].second;
      if (ds.graph.edge_weights[k] != 1.0) {
        out.precision(17);
        out << ' ' << ds.graph.edge_weights[k];
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(feature_path);
    out.precision(17);
    for (std::size_t i = 0; i < ds.features.rows(); ++i) {
      for (std::size_t j = 0; j < ds.features.cols(); ++j) {
        if (j) out << ',';
        out << ds.features(i, j);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(label_path);
    for (std::size_t l : ds.labels) out << l << '\n';
  }
  {
    nlohmann::ordered_json j;
    j["splits"] = nlohmann::ordered_json::array();
    for (const auto& sp : ds.splits) {
      nlohmann::ordered_json js;
      js["name"] = sp.name;
      js["train"] = sp.train;
      js["val"] = sp.val;
      js["test"] = sp.test;
      j["splits"].push_back(js);
    }
    std::ofstream out(split_path);
    out << j.dump(2) << '\n';
  }
}

NormalizedAdjacency normalized_adjacency(const Graph& graph, bool with_self_loops) {
  const std::size_t n = graph.num_nodes;
  std::vector<double> degree(n, with_self_loops ? 1.0 : 0.0);
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    degree[graph.edges[k].first] += graph.edge_weights[k];
    degree[graph.edges[k].second] += graph.edge_weights[k];
  }
  std::vector<double> dinv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > 0.0) dinv[i] = 1.0 / std::sqrt(degree[i]);
  }

  std::vector<std::size_t> r, c;
  std::vector<double> v;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto [i, j] = graph.edges[k];
    const double w = graph.edge_weights[k] * dinv[i] * dinv[j];
    r.push_back(i);
    c.push_back(j);
    v.push_back(w);
    r.push_back(j);
    c.push_back(i);
    v.push_back(w);
  }
  if (with_self_loops) {
    for (std::size_t i = 0; i < n; ++i) {
      r.push_back(i);
      c.push_back(i);
      v.push_back(dinv[i] * dinv[i]);
    }
  }
  NormalizedAdjacency out;
  out.matrix = SparseMatrix::from_triplets(n, n, r, c, v);
  out.with_self_loops = with_self_loops;
  return out;
}

DenseMatrix row_normalize_features(const DenseMatrix& features) {
  DenseMatrix out = features;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < out.cols(); ++j) s += std::fabs(out(i, j));
    if (s > 0.0) {
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= s;
    }
  }
  return out;
}

}  // namespace gcl
