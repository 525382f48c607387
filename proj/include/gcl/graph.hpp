#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcl/matrix.hpp"

namespace gcl {

// Undirected graph. Each edge is stored once with src < dst; the CSR
// adjacency holds both (i,j) and (j,i).
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // src < dst
  std::vector<double> edge_weights;                        // parallel to edges
  SparseMatrix adjacency;

  static Graph build(std::size_t num_nodes,
                     std::vector<std::pair<std::size_t, std::size_t>> edges,
                     std::vector<double> weights = {});

  std::size_t num_edges() const { return edges.size(); }
};

struct Split {
  std::string name;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

struct DatasetBundle {
  Graph graph;
  DenseMatrix features;          // N x d
  std::vector<std::size_t> labels;  // class ids in [0, num_classes)
  std::vector<Split> splits;
  std::size_t num_classes = 0;

  void validate() const;
};

struct NormalizedAdjacency {
  SparseMatrix matrix;
  bool with_self_loops = false;
};

// Thrown for malformed input files; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadStats {
  std::size_t dropped_self_loops = 0;
  std::size_t deduplicated_edges = 0;
};

DatasetBundle load_dataset(const std::string& edge_path,
                           const std::string& feature_path,
                           const std::string& label_path,
                           const std::string& split_path,
                           LoadStats* stats = nullptr);

// Writes the bundle back out in the same four-file layout.
void save_dataset(const DatasetBundle& ds, const std::string& edge_path,
                  const std::string& feature_path, const std::string& label_path,
                  const std::string& split_path);

// D^{-1/2}(A+I)D^{-1/2} when with_self_loops, else D^{-1/2}AD^{-1/2}.
// Isolated nodes get a zero row (identity entry with self-loops).
NormalizedAdjacency normalized_adjacency(const Graph& graph, bool with_self_loops);

// L1 row normalization; zero rows unchanged.
DenseMatrix row_normalize_features(const DenseMatrix& features);

}  // namespace gcl
