#include "aspector/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "aspector/simd.hpp"

namespace aspector::eval {

namespace {

using Json = nlohmann::json;

// deterministic start vectors for the subspace iteration
double seeded_unit(std::uint64_t i) {
  std::uint64_t z = i + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
}

}  // namespace

TopicModel TopicModel::build(const retrieval::Corpus& corpus, int T) {
  TopicModel model;
  const std::size_t n_docs = corpus.size();
  const std::size_t n_terms = corpus.term_count();
  model.n_terms_ = n_terms;
  if (n_docs == 0 || n_terms == 0 || T < 1) return model;

  std::size_t t_request =
      std::min<std::size_t>(static_cast<std::size_t>(T), n_docs);

  // subspace iteration on the doc-side Gram operator G = A^T A
  std::vector<std::vector<double>> cols(t_request, std::vector<double>(n_docs));
  for (std::size_t c = 0; c < t_request; ++c) {
    for (std::size_t i = 0; i < n_docs; ++i) {
      cols[c][i] = seeded_unit(c * n_docs + i);
    }
  }

  std::vector<double> term_buf(n_terms);
  auto apply_gram = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::fill(term_buf.begin(), term_buf.end(), 0.0);
    for (std::size_t j = 0; j < n_docs; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (const auto& [term, w] : corpus.doc_vector(static_cast<int>(j))) {
        term_buf[static_cast<std::size_t>(term)] += xj * w;
      }
    }
    for (std::size_t j = 0; j < n_docs; ++j) {
      double acc = 0.0;
      for (const auto& [term, w] : corpus.doc_vector(static_cast<int>(j))) {
        acc += w * term_buf[static_cast<std::size_t>(term)];
      }
      out[j] = acc;
    }
  };

  auto orthonormalize = [&](std::vector<std::vector<double>>& basis) {
    for (std::size_t c = 0; c < basis.size(); ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        double proj = simd::dot(basis[p], basis[c]);
        simd::axpy(-proj, basis[p], basis[c]);
      }
      double nrm = simd::norm(basis[c]);
      if (nrm > 1e-14) {
        simd::scale(basis[c], 1.0 / nrm);
      } else {
        std::fill(basis[c].begin(), basis[c].end(), 0.0);  // rank exhausted
      }
    }
  };

  orthonormalize(cols);
  std::vector<std::vector<double>> next(t_request, std::vector<double>(n_docs));
  std::vector<double> rayleigh(t_request, 0.0);
  constexpr int kMaxSweeps = 200;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (std::size_t c = 0; c < t_request; ++c) apply_gram(cols[c], next[c]);
    std::swap(cols, next);
    orthonormalize(cols);

    std::vector<double> r(t_request);
    double change = 0.0;
    for (std::size_t c = 0; c < t_request; ++c) {
      apply_gram(cols[c], next[c]);
      r[c] = simd::dot(cols[c], next[c]);
      change = std::max(change, std::abs(r[c] - rayleigh[c]));
    }
    double scale_ref = std::max(1.0, std::abs(r.empty() ? 0.0 : r[0]));
    rayleigh = std::move(r);
    if (change <= 1e-12 * scale_ref) break;
  }

  // order by eigenvalue, drop numerically-zero components
  std::vector<std::size_t> order(t_request);
  for (std::size_t c = 0; c < t_request; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rayleigh[a] > rayleigh[b]; });
  double top = t_request > 0 ? std::max(rayleigh[order[0]], 0.0) : 0.0;
  std::vector<std::size_t> kept;
  for (std::size_t c : order) {
    if (rayleigh[c] > 0.0 && rayleigh[c] > top * 1e-20) kept.push_back(c);
  }
  if (kept.empty()) return model;

  model.T_ = static_cast<int>(kept.size());
  model.singular_.reserve(kept.size());

  // sign convention: largest-magnitude entry of each doc-side vector positive
  for (std::size_t c : kept) {
    auto& v = cols[c];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n_docs; ++i) {
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0.0) simd::scale(v, -1.0);
    model.singular_.push_back(std::sqrt(rayleigh[c]));
  }

  // term-side vectors: u_c = A v_c / sigma_c
  const std::size_t t_kept = kept.size();
  model.term_topics_.assign(n_terms * t_kept, 0.0);
  for (std::size_t out_c = 0; out_c < t_kept; ++out_c) {
    const auto& v = cols[kept[out_c]];
    const double inv_sigma = 1.0 / model.singular_[out_c];
    for (std::size_t j = 0; j < n_docs; ++j) {
      const double vj = v[j];
      if (vj == 0.0) continue;
      for (const auto& [term, w] : corpus.doc_vector(static_cast<int>(j))) {
        model.term_topics_[static_cast<std::size_t>(term) * t_kept + out_c] +=
            w * vj * inv_sigma;
      }
    }
  }

  // corpus document projections through the term map
  model.doc_topics_.assign(n_docs * t_kept, 0.0);
  for (std::size_t j = 0; j < n_docs; ++j) {
    double* out = &model.doc_topics_[j * t_kept];
    for (const auto& [term, w] : corpus.doc_vector(static_cast<int>(j))) {
      const double* row = &model.term_topics_[static_cast<std::size_t>(term) * t_kept];
      simd::axpy(w, std::span<const double>(row, t_kept), std::span<double>(out, t_kept));
    }
  }
  return model;
}

TopicModel build_topic_model(const retrieval::Corpus& corpus, int T) {
  return TopicModel::build(corpus, T);
}

std::vector<double> TopicModel::doc_vector(int doc_index) const {
  if (T_ == 0) return {};
  const std::size_t t = static_cast<std::size_t>(T_);
  auto begin = doc_topics_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(doc_index) * t);
  return std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(t));
}

std::vector<double> TopicModel::project_text(const retrieval::Corpus& corpus,
                                             const std::string& text) const {
  if (T_ == 0) return {};
  const std::size_t t = static_cast<std::size_t>(T_);
  std::vector<double> out(t, 0.0);
  for (const auto& [term, w] : corpus.vectorize(text)) {
    const double* row = &term_topics_[static_cast<std::size_t>(term) * t];
    simd::axpy(w, std::span<const double>(row, t), std::span<double>(out));
  }
  return out;
}

double TopicModel::tsim(int doc_a, int doc_b) const {
  if (T_ == 0) return 0.0;
  const std::size_t t = static_cast<std::size_t>(T_);
  std::span<const double> va(&doc_topics_[static_cast<std::size_t>(doc_a) * t], t);
  std::span<const double> vb(&doc_topics_[static_cast<std::size_t>(doc_b) * t], t);
  double c = simd::cosine(va, vb);
  return std::clamp(c, -1.0, 1.0);
}

double aspect_topic_sim(const retrieval::SearchEngine& engine, const TopicModel& model,
                        const std::string& a1, const std::string& a2, int m) {
  const auto d1 = engine.search(a1, m).docs;
  const auto d2 = engine.search(a2, m).docs;
  if (d1.empty() || d2.empty()) return 0.0;
  double total = 0.0;
  for (const auto& di : d1) {
    for (const auto& dj : d2) total += model.tsim(di.doc_index, dj.doc_index);
  }
  return total / (static_cast<double>(d1.size()) * static_cast<double>(d2.size()));
}

double nsim(const retrieval::SearchEngine& engine, const TopicModel& model,
            const std::vector<std::string>& aspects, int m) {
  const std::size_t n = aspects.size();
  if (n < 2) throw MetricError("nsim needs at least two aspects");
  double asim = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      asim += aspect_topic_sim(engine, model, aspects[i], aspects[j], m);
    }
  }
  asim *= 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  double isim = 0.0;
  for (const auto& a : aspects) isim += aspect_topic_sim(engine, model, a, a, m);
  isim /= static_cast<double>(n);
  if (isim == 0.0) throw MetricError("nsim undefined: isim is zero");
  return asim / isim;
}

CoverageResult coverage_overlap(const retrieval::SearchEngine& engine,
                                const std::string& query,
                                const std::vector<std::string>& aspects, int k, int N) {
  CoverageResult result;
  std::set<int> top_n;
  for (const auto& d : engine.search(query, N).docs) top_n.insert(d.doc_index);

  std::set<int> aspect_union;
  for (const auto& a : aspects) {
    for (const auto& d : engine.search(a, k).docs) aspect_union.insert(d.doc_index);
  }
  if (aspect_union.empty()) {
    result.overlap = 1.0;  // vacuous: no aspect retrieved anything
    result.vacuous = true;
    return result;
  }
  std::size_t hits = 0;
  for (int doc : aspect_union) {
    const std::string& id = engine.corpus().doc(doc).doc_id;
    result.aspect_docs.push_back(id);
    if (top_n.count(doc)) {
      ++hits;
    } else {
      result.new_docs.push_back(id);
    }
  }
  result.overlap = static_cast<double>(hits) / static_cast<double>(aspect_union.size());
  return result;
}

std::vector<GoldClustering> load_gold(const std::string& path) {
  std::vector<GoldClustering> out;
  for (const auto& line : tsv::read_lines(path)) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("query") || !j.contains("clusters")) {
      throw DataError("bad gold clustering line: " + line);
    }
    GoldClustering gold;
    gold.query = j.at("query").get<std::string>();
    gold.clusters = j.at("clusters").get<std::vector<std::vector<std::string>>>();
    std::set<std::string> seen;
    for (const auto& cluster : gold.clusters) {
      for (const auto& a : cluster) {
        if (!seen.insert(a).second) {
          throw DataError("gold clustering repeats aspect '" + a + "' for query " +
                          gold.query);
        }
        gold.aspects.push_back(a);
      }
    }
    std::sort(gold.aspects.begin(), gold.aspects.end());
    out.push_back(std::move(gold));
  }
  return out;
}

double pair_f_measure(const std::vector<std::vector<std::string>>& predicted,
                      const GoldClustering& gold) {
  std::map<std::string, int> pred_id;
  for (std::size_t c = 0; c < predicted.size(); ++c) {
    for (const auto& a : predicted[c]) {
      if (!pred_id.emplace(a, static_cast<int>(c)).second) {
        throw DataError("predicted clustering repeats aspect '" + a + "'");
      }
    }
  }
  std::map<std::string, int> gold_id;
  for (std::size_t c = 0; c < gold.clusters.size(); ++c) {
    for (const auto& a : gold.clusters[c]) gold_id.emplace(a, static_cast<int>(c));
  }
  if (pred_id.size() != gold_id.size()) {
    throw DataError("clustering universes differ in size");
  }
  for (const auto& [a, _] : pred_id) {
    if (!gold_id.count(a)) throw DataError("aspect '" + a + "' missing from gold");
  }

  std::vector<const std::string*> universe;
  universe.reserve(pred_id.size());
  for (const auto& [a, _] : pred_id) universe.push_back(&a);

  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    for (std::size_t j = i + 1; j < universe.size(); ++j) {
      bool same_pred = pred_id.at(*universe[i]) == pred_id.at(*universe[j]);
      bool same_gold = gold_id.at(*universe[i]) == gold_id.at(*universe[j]);
      if (same_pred && same_gold) ++tp;
      else if (same_pred) ++fp;
      else if (same_gold) ++fn;
    }
  }
  if (tp == 0) {
    // no positive pairs anywhere means the two all-singleton partitions agree
    return (fp == 0 && fn == 0) ? 1.0 : 0.0;
  }
  double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<SweepRow> sigma_sweep(const std::vector<SweepCase>& cases,
                                  const std::vector<double>& sigmas) {
  std::vector<SweepRow> rows;
  rows.reserve(sigmas.size());
  for (double sigma : sigmas) {
    double total = 0.0;
    for (const auto& c : cases) {
      auto clusters = dedup::cluster(c.sim, c.scores, sigma);
      std::vector<std::vector<std::string>> partition;
      partition.reserve(clusters.size());
      for (auto& cl : clusters) partition.push_back(cl.members);
      total += pair_f_measure(partition, c.gold);
    }
    rows.push_back({sigma, cases.empty() ? 0.0 : total / static_cast<double>(cases.size())});
  }
  return rows;
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace aspector::eval
