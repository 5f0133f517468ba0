#include "aspector/dedup.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

namespace aspector::dedup {

int SimilarityMatrix::index_of(const std::string& aspect) const {
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (aspects[i] == aspect) return static_cast<int>(i);
  }
  return -1;
}

SimilarityMatrix similarity_matrix(const retrieval::SearchEngine& engine,
                                   const std::vector<std::string>& aspects, int m,
                                   int threads, bool concat_measure) {
  SimilarityMatrix matrix;
  matrix.aspects = aspects;
  const std::size_t n = aspects.size();
  matrix.values.assign(n * n, 0.0);

  // warm the retrieval memo sequentially so the pair fill is read-mostly
  for (const auto& a : aspects) engine.search(a, m);

  auto measure = concat_measure ? retrieval::aspect_sim_concat : retrieval::aspect_sim;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  }

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto [i, j] = pairs[k];
      matrix.set(i, j, measure(engine, aspects[i], aspects[j], m));
    }
  };

  int workers = std::max(1, threads);
  if (workers == 1 || pairs.size() < 2) {
    fill(0, pairs.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (pairs.size() + static_cast<std::size_t>(workers) - 1) /
                        static_cast<std::size_t>(workers);
    for (int t = 0; t < workers; ++t) {
      std::size_t begin = static_cast<std::size_t>(t) * chunk;
      std::size_t end = std::min(pairs.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(fill, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return matrix;
}

std::vector<AspectCluster> cluster(const SimilarityMatrix& matrix,
                                   const std::map<std::string, double>& scores,
                                   double sigma) {
  const std::size_t n = matrix.aspects.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix.at(i, j) > sigma) parent[find(i)] = find(j);
    }
  }

  std::map<std::size_t, std::vector<std::string>> components;
  for (std::size_t i = 0; i < n; ++i) {
    components[find(i)].push_back(matrix.aspects[i]);
  }

  auto score_of = [&](const std::string& a) {
    auto it = scores.find(a);
    return it == scores.end() ? 0.0 : it->second;
  };

  std::vector<AspectCluster> clusters;
  for (auto& [_, members] : components) {
    std::sort(members.begin(), members.end());
    AspectCluster c;
    c.members = std::move(members);
    c.label = c.members.front();
    c.label_score = score_of(c.label);
    for (const auto& a : c.members) {
      double s = score_of(a);
      if (s > c.label_score) {
        c.label = a;
        c.label_score = s;
      }
    }
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [](const AspectCluster& a, const AspectCluster& b) {
    if (a.label_score != b.label_score) return a.label_score > b.label_score;
    return a.label < b.label;
  });
  return clusters;
}

}  // namespace aspector::dedup
