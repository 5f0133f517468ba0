#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "aspector/dedup.hpp"

using namespace aspector;
using dedup::SimilarityMatrix;

namespace {

SimilarityMatrix matrix_from(const std::vector<std::string>& aspects,
                             const std::vector<std::vector<double>>& values) {
  SimilarityMatrix m;
  m.aspects = aspects;
  m.values.assign(aspects.size() * aspects.size(), 0.0);
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    for (std::size_t j = 0; j < aspects.size(); ++j) {
      m.values[i * aspects.size() + j] = values[i][j];
    }
  }
  return m;
}

// independent reference: repeated pairwise union over all edges
std::vector<std::set<std::string>> brute_components(const SimilarityMatrix& m, double sigma) {
  std::vector<std::set<std::string>> comps;
  for (const auto& a : m.aspects) comps.push_back({a});
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < m.aspects.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < m.aspects.size() && !changed; ++j) {
        if (!(m.at(i, j) > sigma)) continue;
        std::size_t ci = 0, cj = 0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
          if (comps[c].count(m.aspects[i])) ci = c;
          if (comps[c].count(m.aspects[j])) cj = c;
        }
        if (ci != cj) {
          comps[ci].insert(comps[cj].begin(), comps[cj].end());
          comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(cj));
          changed = true;
        }
      }
    }
  }
  return comps;
}

}  // namespace

TEST_CASE("single aspect gives a 1x1 matrix and one cluster") {
  auto corpus = retrieval::Corpus::index({{"d1", "solo topic", "words", "", ""}});
  retrieval::SearchEngine engine(corpus);
  auto m = dedup::similarity_matrix(engine, {"solo topic"}, 8);
  CHECK(m.aspects.size() == 1);
  CHECK(m.values.size() == 1);
  auto clusters = dedup::cluster(m, {{"solo topic", 1.0}}, 0.35);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].label == "solo topic");
}

TEST_CASE("similarity matrix is symmetric, including threaded fill") {
  auto corpus = retrieval::Corpus::index({
      {"d1", "vietnam travel package", "tour deal booking", "", ""},
      {"d2", "vietnam travel packages", "tour deal booking", "", ""},
      {"d3", "vietnam visa", "embassy application form", "", ""},
      {"d4", "hanoi weather", "forecast rain season", "", ""},
  });
  retrieval::SearchEngine engine(corpus);
  std::vector<std::string> aspects{"vietnam travel package", "vietnam travel packages",
                                   "vietnam visa", "hanoi weather"};
  auto m1 = dedup::similarity_matrix(engine, aspects, 8, 1);
  auto m4 = dedup::similarity_matrix(engine, aspects, 8, 4);
  CHECK(m1.values == m4.values);
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    for (std::size_t j = 0; j < aspects.size(); ++j) {
      CHECK(m1.at(i, j) == m1.at(j, i));
    }
  }
}

TEST_CASE("near-duplicate aspects pinned via retrieval cache are highly similar") {
  auto corpus = retrieval::Corpus::index({
      {"p1", "vietnam travel package", "tour deal booking discount", "", ""},
      {"p2", "vietnam travel packages", "tour deal booking holiday", "", ""},
      {"v1", "vietnam visa", "embassy application form", "", ""},
  });
  retrieval::SearchEngine engine(corpus);
  engine.pin("vietnam travel package", {"p1", "p2"});
  engine.pin("vietnam travel packages", {"p2", "p1"});
  engine.pin("vietnam visa", {"v1"});
  auto m = dedup::similarity_matrix(
      engine, {"vietnam travel package", "vietnam travel packages", "vietnam visa"}, 8);
  CHECK(m.at(0, 1) > 0.5);
  CHECK(m.at(0, 2) < 0.3);
}

TEST_CASE("cluster edge rule is strictly greater-than sigma") {
  auto m = matrix_from({"a", "b"}, {{1.0, 0.35}, {0.35, 1.0}});
  auto at_sigma = dedup::cluster(m, {}, 0.35);
  CHECK(at_sigma.size() == 2);  // 0.35 > 0.35 is false
  auto below = dedup::cluster(m, {}, 0.3499);
  CHECK(below.size() == 1);
}

TEST_CASE("transitive connectivity merges chains") {
  auto m = matrix_from({"a", "b", "c"},
                       {{1.0, 0.6, 0.1}, {0.6, 1.0, 0.5}, {0.1, 0.5, 1.0}});
  auto clusters =
      dedup::cluster(m, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}, 0.35);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].members.size() == 3);
  CHECK(clusters[0].label == "a");
  CHECK(clusters[0].label_score == 0.5);
}

TEST_CASE("sigma extremes") {
  auto m = matrix_from({"a", "b", "c"},
                       {{1.0, 0.6, 0.2}, {0.6, 1.0, 0.4}, {0.2, 0.4, 1.0}});
  CHECK(dedup::cluster(m, {}, 1.0).size() == 3);   // no edges
  CHECK(dedup::cluster(m, {}, 0.0).size() == 1);   // all sims > 0
}

TEST_CASE("clusters partition the aspects; label has the max score") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + gen() % 9;
    std::vector<std::string> aspects;
    for (std::size_t i = 0; i < n; ++i) aspects.push_back("a" + std::to_string(i));
    SimilarityMatrix m;
    m.aspects = aspects;
    m.values.assign(n * n, 0.0);
    std::map<std::string, double> scores;
    for (std::size_t i = 0; i < n; ++i) {
      scores[aspects[i]] = static_cast<double>(gen() % 1000) / 1000.0;
      m.values[i * n + i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = static_cast<double>(gen() % 1000) / 1000.0;
        m.set(i, j, v);
      }
    }
    double sigma = static_cast<double>(gen() % 100) / 100.0;
    auto clusters = dedup::cluster(m, scores, sigma);

    std::set<std::string> seen;
    for (const auto& c : clusters) {
      CHECK(std::find(c.members.begin(), c.members.end(), c.label) != c.members.end());
      for (const auto& a : c.members) {
        CHECK(seen.insert(a).second);
        CHECK(scores[a] <= c.label_score);
      }
    }
    CHECK(seen.size() == n);

    // equivalence against the brute-force union oracle
    auto expected = brute_components(m, sigma);
    CHECK(expected.size() == clusters.size());
    for (const auto& c : clusters) {
      std::set<std::string> as_set(c.members.begin(), c.members.end());
      CHECK(std::find(expected.begin(), expected.end(), as_set) != expected.end());
    }
  }
}

TEST_CASE("lowering sigma never increases the cluster count") {
  std::mt19937_64 gen(9);
  std::size_t n = 8;
  SimilarityMatrix m;
  for (std::size_t i = 0; i < n; ++i) m.aspects.push_back("a" + std::to_string(i));
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      m.set(i, j, static_cast<double>(gen() % 1000) / 1000.0);
    }
  }
  std::size_t prev = 0;
  for (double sigma = 1.0; sigma >= -0.01; sigma -= 0.05) {
    auto count = dedup::cluster(m, {}, std::max(sigma, 0.0)).size();
    if (prev != 0) CHECK(count <= prev);
    prev = count;
  }
}
