#pragma once

// Offline metrics: topic-space inter-aspect similarity (nsim), coverage
// overlap, and pair-decision clustering F-measure with the sigma sweep.

#include <map>
#include <string>
#include <vector>

#include "aspector/dedup.hpp"
#include "aspector/retrieval.hpp"
#include "aspector/tsv.hpp"

namespace aspector::eval {

// Raised when a metric is undefined on its input (e.g. isim == 0).
struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rank-T latent-semantic embedding of the corpus TF-IDF term-document
// matrix. Deterministic: fixed iteration schedule, fixed start, and the
// largest-magnitude entry of each singular vector made positive.
class TopicModel {
 public:
  static TopicModel build(const retrieval::Corpus& corpus, int T);

  int dimensionality() const { return T_; }
  const std::vector<double>& singular_values() const { return singular_; }

  // T-dimensional projection of a corpus document (precomputed).
  std::vector<double> doc_vector(int doc_index) const;
  // Projection of arbitrary text through the term->topic map; empty or
  // out-of-vocabulary text projects to the zero vector.
  std::vector<double> project_text(const retrieval::Corpus& corpus,
                                   const std::string& text) const;

  // Cosine of the two documents' topic vectors, clamped to [-1, 1]; 0 when
  // either projection is zero.
  double tsim(int doc_a, int doc_b) const;

 private:
  int T_ = 0;
  std::size_t n_terms_ = 0;
  std::vector<double> term_topics_;  // n_terms x T row-major
  std::vector<double> doc_topics_;   // n_docs x T row-major
  std::vector<double> singular_;
};

TopicModel build_topic_model(const retrieval::Corpus& corpus, int T);

// Average all-pairs topic similarity of the two aspects' top-m retrievals:
//   (1 / (|D_1| * |D_2|)) * sum tsim(d_i, d_j); 0 when either D is empty.
double aspect_topic_sim(const retrieval::SearchEngine& engine, const TopicModel& model,
                        const std::string& a1, const std::string& a2, int m);

// asim / isim over the aspect set; requires >= 2 aspects. Throws MetricError
// when isim == 0 (undefined).
double nsim(const retrieval::SearchEngine& engine, const TopicModel& model,
            const std::vector<std::string>& aspects, int m);

struct CoverageResult {
  double overlap = 0.0;  // |D_k^a intersect D_N| / |D_k^a|
  bool vacuous = false;  // D_k^a was empty; overlap pinned to 1.0
  std::vector<std::string> aspect_docs;  // union of per-aspect top-k doc_ids
  std::vector<std::string> new_docs;     // aspect docs outside D_N
};

CoverageResult coverage_overlap(const retrieval::SearchEngine& engine,
                                const std::string& query,
                                const std::vector<std::string>& aspects, int k, int N);

struct GoldClustering {
  std::string query;
  std::vector<std::string> aspects;               // union of the clusters
  std::vector<std::vector<std::string>> clusters; // exact partition
};

// JSON-lines: {"query": ..., "clusters": [[...], ...]}
std::vector<GoldClustering> load_gold(const std::string& path);

// Same-cluster decisions over all unordered pairs. Throws DataError when the
// two partitions cover different aspect universes. Both all-singletons -> 1.
double pair_f_measure(const std::vector<std::vector<std::string>>& predicted,
                      const GoldClustering& gold);

struct SweepCase {
  dedup::SimilarityMatrix sim;
  std::map<std::string, double> scores;
  GoldClustering gold;
};

struct SweepRow {
  double sigma = 0.0;
  double mean_f = 0.0;
};

// Clusters every case at each sigma and averages the pair F-measure.
std::vector<SweepRow> sigma_sweep(const std::vector<SweepCase>& cases,
                                  const std::vector<double>& sigmas);

// 6-decimal fixed-point rendering used by every metrics CSV.
std::string fixed6(double v);

}  // namespace aspector::eval
