#pragma once

// Redundancy elimination: sigma-threshold similarity graph, connected
// components as clusters.

#include <map>
#include <string>
#include <vector>

#include "aspector/retrieval.hpp"

namespace aspector::dedup {

struct SimilarityMatrix {
  std::vector<std::string> aspects;
  std::vector<double> values;  // row-major aspects.size()^2, symmetric

  double at(std::size_t i, std::size_t j) const { return values[i * aspects.size() + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values[i * aspects.size() + j] = v;
    values[j * aspects.size() + i] = v;
  }
  int index_of(const std::string& aspect) const;
};

// All unordered pairs via retrieval::aspect_sim, each computed once.
// Retrievals are warmed sequentially; the pair fill may use `threads`.
SimilarityMatrix similarity_matrix(const retrieval::SearchEngine& engine,
                                   const std::vector<std::string>& aspects, int m,
                                   int threads = 1, bool concat_measure = false);

struct AspectCluster {
  std::string label;        // member with the highest score
  double label_score = 0.0;
  std::vector<std::string> members;  // sorted lexicographically
};

// Edge iff sim > sigma (strict); clusters are connected components, labeled
// by their best-scoring member (lexicographic tie-break) and ordered by
// label_score descending then label.
std::vector<AspectCluster> cluster(const SimilarityMatrix& matrix,
                                   const std::map<std::string, double>& scores,
                                   double sigma);

}  // namespace aspector::dedup
