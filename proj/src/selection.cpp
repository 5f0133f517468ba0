#include "aspector/selection.hpp"

#include <algorithm>

#include "aspector/tsv.hpp"

namespace aspector::selection {

namespace {

struct Candidate {
  std::size_t group;
  int sim_index;
  double score;
  const std::string* rep;
};

// zero similarity to the selected set is maximal orthogonality: such
// candidates outrank every finite ratio, ordered by score then label
bool better(const Candidate& a, double sim_a, const Candidate& b, double sim_b) {
  const bool a_inf = sim_a == 0.0;
  const bool b_inf = sim_b == 0.0;
  if (a_inf != b_inf) return a_inf;
  if (a_inf) {
    if (a.score != b.score) return a.score > b.score;
    return *a.rep < *b.rep;
  }
  const double ra = a.score / sim_a;
  const double rb = b.score / sim_b;
  if (ra != rb) return ra > rb;
  if (a.score != b.score) return a.score > b.score;
  return *a.rep < *b.rep;
}

}  // namespace

std::vector<grouping::AspectGroup> select(const SelectionInput& input) {
  std::vector<Candidate> pool;
  pool.reserve(input.groups.size());
  for (std::size_t i = 0; i < input.groups.size(); ++i) {
    const auto& g = input.groups[i];
    int idx = input.sim.index_of(g.representative);
    if (idx < 0) throw DataError("similarity matrix misses aspect: " + g.representative);
    pool.push_back({i, idx, g.group_score, &g.representative});
  }

  std::vector<grouping::AspectGroup> ranked;
  if (pool.empty()) return ranked;

  std::size_t first = 0;
  for (std::size_t k = 1; k < pool.size(); ++k) {
    if (pool[k].score > pool[first].score ||
        (pool[k].score == pool[first].score && *pool[k].rep < *pool[first].rep)) {
      first = k;
    }
  }
  std::vector<int> selected_sim_idx{pool[first].sim_index};
  ranked.push_back(input.groups[pool[first].group]);
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(first));

  auto sim_to_selected = [&](const Candidate& c) {
    double best = 0.0;
    for (int s : selected_sim_idx) {
      best = std::max(best, input.sim.at(static_cast<std::size_t>(c.sim_index),
                                         static_cast<std::size_t>(s)));
    }
    return best;
  };

  while (!pool.empty()) {
    std::size_t pick = 0;
    double pick_sim = sim_to_selected(pool[0]);
    for (std::size_t k = 1; k < pool.size(); ++k) {
      double k_sim = sim_to_selected(pool[k]);
      if (better(pool[k], k_sim, pool[pick], pick_sim)) {
        pick = k;
        pick_sim = k_sim;
      }
    }
    selected_sim_idx.push_back(pool[pick].sim_index);
    ranked.push_back(input.groups[pool[pick].group]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  if (ranked.size() > static_cast<std::size_t>(std::max(input.n, 0))) {
    ranked.resize(static_cast<std::size_t>(std::max(input.n, 0)));
  }
  return ranked;
}

}  // namespace aspector::selection
