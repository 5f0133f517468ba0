#include <doctest.h>

#include <random>

#include "aspector/selection.hpp"

using namespace aspector;
using grouping::AspectGroup;
using selection::SelectionInput;

namespace {

AspectGroup group_of(const std::string& label, double score) {
  AspectGroup g;
  g.display_label = label;
  g.group_score = score;
  g.representative = label;
  g.members.push_back({label, score, {label}});
  return g;
}

SelectionInput input_from(const std::vector<std::pair<std::string, double>>& scored,
                          const std::vector<std::vector<double>>& sims, int n) {
  SelectionInput input;
  input.n = n;
  for (const auto& [label, score] : scored) input.groups.push_back(group_of(label, score));
  input.sim.aspects.clear();
  for (const auto& [label, _] : scored) input.sim.aspects.push_back(label);
  auto sz = scored.size();
  input.sim.values.assign(sz * sz, 0.0);
  for (std::size_t i = 0; i < sz; ++i) {
    for (std::size_t j = 0; j < sz; ++j) input.sim.values[i * sz + j] = sims[i][j];
  }
  return input;
}

std::vector<std::string> labels_of(const std::vector<AspectGroup>& groups) {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.display_label);
  return out;
}

}  // namespace

TEST_CASE("single aspect comes back alone") {
  auto input = input_from({{"a", 0.7}}, {{1.0}}, 8);
  auto out = selection::select(input);
  REQUIRE(out.size() == 1);
  CHECK(out[0].display_label == "a");
}

TEST_CASE("zero-similarity candidates beat better-scored redundant ones") {
  auto input = input_from({{"a1", 0.5}, {"a2", 0.4}, {"a3", 0.1}},
                          {{1.0, 0.9, 0.1}, {0.9, 1.0, 0.1}, {0.1, 0.1, 1.0}}, 8);
  auto out = labels_of(selection::select(input));
  CHECK(out == std::vector<std::string>{"a1", "a3", "a2"});
}

TEST_CASE("output budget truncates the ranking") {
  auto input = input_from({{"a", 0.9}, {"b", 0.8}, {"c", 0.7}},
                          {{1, 0.5, 0.5}, {0.5, 1, 0.5}, {0.5, 0.5, 1}}, 2);
  CHECK(selection::select(input).size() == 2);
}

TEST_CASE("prefix property: smaller budgets are prefixes of larger ones") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 2 + gen() % 5;
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < n; ++i) {
      scored.emplace_back("g" + std::to_string(i),
                          static_cast<double>(1 + gen() % 1000) / 1000.0);
    }
    std::vector<std::vector<double>> sims(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      sims[i][i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = (gen() % 4 == 0) ? 0.0 : static_cast<double>(gen() % 1000) / 1000.0;
        sims[i][j] = sims[j][i] = v;
      }
    }
    std::vector<std::string> previous;
    for (int budget = 1; budget <= static_cast<int>(n); ++budget) {
      auto out = labels_of(selection::select(input_from(scored, sims, budget)));
      REQUIRE(out.size() == static_cast<std::size_t>(budget));
      for (std::size_t i = 0; i < previous.size(); ++i) CHECK(out[i] == previous[i]);
      previous = out;
    }
  }
}

TEST_CASE("selection order is invariant under positive score scaling") {
  std::vector<std::pair<std::string, double>> scored{
      {"a", 0.31}, {"b", 0.27}, {"c", 0.22}, {"d", 0.2}};
  std::vector<std::vector<double>> sims{{1, 0.8, 0.05, 0.0},
                                        {0.8, 1, 0.4, 0.3},
                                        {0.05, 0.4, 1, 0.6},
                                        {0.0, 0.3, 0.6, 1}};
  auto base = labels_of(selection::select(input_from(scored, sims, 4)));
  for (double factor : {0.001, 3.0, 1000.0}) {
    auto scaled = scored;
    for (auto& [_, s] : scaled) s *= factor;
    CHECK(labels_of(selection::select(input_from(scaled, sims, 4))) == base);
  }
}

TEST_CASE("output size is min(n, |S|)") {
  auto input = input_from({{"a", 0.9}, {"b", 0.8}},
                          {{1.0, 0.2}, {0.2, 1.0}}, 8);
  CHECK(selection::select(input).size() == 2);
}
