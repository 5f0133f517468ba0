#include "aspector/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace aspector::retrieval {

namespace {

using Json = nlohmann::json;

std::map<std::string, int> term_frequencies(const std::string& text) {
  std::map<std::string, int> tf;
  for (const auto& tok : text::tokenize(text::normalize_query(text))) tf[tok] += 1;
  return tf;
}

double sparse_cosine(const std::vector<std::pair<int, double>>& a, double norm_a,
                     const std::vector<std::pair<int, double>>& b, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot / (norm_a * norm_b);
}

double sparse_norm(const std::vector<std::pair<int, double>>& v) {
  double s = 0.0;
  for (const auto& [_, w] : v) s += w * w;
  return std::sqrt(s);
}

}  // namespace

Corpus Corpus::index(std::vector<Document> documents) {
  Corpus corpus;
  corpus.docs_ = std::move(documents);

  std::vector<std::map<std::string, int>> tfs;
  tfs.reserve(corpus.docs_.size());
  std::map<std::string, std::int64_t> df;
  for (std::size_t i = 0; i < corpus.docs_.size(); ++i) {
    const auto& d = corpus.docs_[i];
    if (d.doc_id.empty()) throw DataError("document with empty doc_id");
    if (!corpus.doc_ids_.emplace(d.doc_id, static_cast<int>(i)).second) {
      throw DataError("duplicate doc_id: " + d.doc_id);
    }
    tfs.push_back(term_frequencies(d.head + " " + d.snippet));
    for (const auto& [term, _] : tfs.back()) df[term] += 1;
  }

  const double n_docs = static_cast<double>(corpus.docs_.size());
  corpus.terms_.reserve(df.size());
  for (const auto& [term, count] : df) {
    int id = static_cast<int>(corpus.terms_.size());
    corpus.term_ids_.emplace(term, id);
    corpus.terms_.push_back(term);
    corpus.dfs_.push_back(count);
    corpus.idfs_.push_back(std::log(n_docs / static_cast<double>(count)));
  }

  corpus.postings_.resize(corpus.terms_.size());
  corpus.doc_vecs_.resize(corpus.docs_.size());
  corpus.doc_norms_.resize(corpus.docs_.size());
  for (std::size_t i = 0; i < corpus.docs_.size(); ++i) {
    auto& vec = corpus.doc_vecs_[i];
    for (const auto& [term, tf] : tfs[i]) {
      int id = corpus.term_ids_.at(term);
      double w = static_cast<double>(tf) * corpus.idfs_[static_cast<std::size_t>(id)];
      if (w == 0.0) continue;  // df == N terms carry no signal
      vec.emplace_back(id, w);
    }
    std::sort(vec.begin(), vec.end());
    corpus.doc_norms_[i] = sparse_norm(vec);
    for (const auto& [id, w] : vec) {
      corpus.postings_[static_cast<std::size_t>(id)].emplace_back(static_cast<int>(i), w);
    }
  }
  return corpus;
}

int Corpus::doc_index(const std::string& doc_id) const {
  auto it = doc_ids_.find(doc_id);
  return it == doc_ids_.end() ? -1 : it->second;
}

std::int64_t Corpus::df(const std::string& term) const {
  auto it = term_ids_.find(term);
  return it == term_ids_.end() ? 0 : dfs_[static_cast<std::size_t>(it->second)];
}

std::vector<std::pair<int, double>> Corpus::vectorize(const std::string& text) const {
  std::vector<std::pair<int, double>> vec;
  for (const auto& [term, tf] : term_frequencies(text)) {
    auto it = term_ids_.find(term);
    if (it == term_ids_.end()) continue;
    double w = static_cast<double>(tf) * idfs_[static_cast<std::size_t>(it->second)];
    if (w == 0.0) continue;
    vec.emplace_back(it->second, w);
  }
  std::sort(vec.begin(), vec.end());
  return vec;
}

RetrievalResult Corpus::search(const std::string& query, int m) const {
  RetrievalResult result;
  result.query = query;
  if (m < 1) return result;

  auto qvec = vectorize(query);
  double qnorm = sparse_norm(qvec);
  if (qnorm == 0.0) return result;

  std::map<int, double> dots;
  for (const auto& [term_id, qw] : qvec) {
    for (const auto& [doc, dw] : postings_[static_cast<std::size_t>(term_id)]) {
      dots[doc] += qw * dw;
    }
  }

  std::vector<ScoredDoc> scored;
  scored.reserve(dots.size());
  for (const auto& [doc, dot] : dots) {
    double norm = doc_norms_[static_cast<std::size_t>(doc)];
    if (norm == 0.0 || dot == 0.0) continue;
    scored.push_back({doc, dot / (qnorm * norm)});
  }
  std::sort(scored.begin(), scored.end(), [this](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return docs_[static_cast<std::size_t>(a.doc_index)].doc_id <
           docs_[static_cast<std::size_t>(b.doc_index)].doc_id;
  });
  if (scored.size() > static_cast<std::size_t>(m)) scored.resize(static_cast<std::size_t>(m));
  result.docs = std::move(scored);
  return result;
}

double Corpus::dsim(int doc_a, int doc_b) const {
  return sparse_cosine(doc_vecs_[static_cast<std::size_t>(doc_a)], doc_norms_[static_cast<std::size_t>(doc_a)],
                       doc_vecs_[static_cast<std::size_t>(doc_b)], doc_norms_[static_cast<std::size_t>(doc_b)]);
}

double dsim(const Document& d1, const Document& d2, const Corpus& corpus) {
  int a = corpus.doc_index(d1.doc_id);
  int b = corpus.doc_index(d2.doc_id);
  if (a < 0 || b < 0) throw DataError("dsim on documents not in the corpus");
  return corpus.dsim(a, b);
}

RetrievalResult SearchEngine::search(const std::string& query, int m) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(query, m);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  RetrievalResult result;
  auto pin_it = pinned_.find(query);
  if (pin_it != pinned_.end()) {
    result.query = query;
    const auto& pins = pin_it->second;
    std::size_t take = std::min(pins.size(), static_cast<std::size_t>(std::max(m, 0)));
    for (std::size_t k = 0; k < take; ++k) {
      result.docs.push_back({pins[k], 1.0 / static_cast<double>(k + 1)});
    }
  } else {
    result = corpus_->search(query, m);
  }
  memo_.emplace(std::move(key), result);
  return result;
}

void SearchEngine::pin(const std::string& query, const std::vector<std::string>& doc_ids) {
  std::vector<int> idx;
  idx.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    int i = corpus_->doc_index(id);
    if (i < 0) throw DataError("retrieval cache names unknown doc_id: " + id);
    idx.push_back(i);
  }
  std::lock_guard<std::mutex> lock(mu_);
  pinned_[text::normalize_query(query)] = std::move(idx);
  memo_.clear();
}

void SearchEngine::load_cache(const std::string& path) {
  for (const auto& line : tsv::read_lines(path)) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("query") || !j.contains("doc_ids")) {
      throw DataError("bad retrieval cache line: " + line);
    }
    pin(j.at("query").get<std::string>(),
        j.at("doc_ids").get<std::vector<std::string>>());
  }
}

double aspect_sim(const SearchEngine& engine, const std::string& a_i,
                  const std::string& a_j, int m) {
  const auto di = engine.search(a_i, m).docs;
  const auto dj = engine.search(a_j, m).docs;
  if (di.empty() || dj.empty()) return 0.0;

  const Corpus& corpus = engine.corpus();
  double sum_i = 0.0;
  for (const auto& d : di) {
    double best = 0.0;
    for (const auto& e : dj) best = std::max(best, corpus.dsim(d.doc_index, e.doc_index));
    sum_i += best;
  }
  double sum_j = 0.0;
  for (const auto& e : dj) {
    double best = 0.0;
    for (const auto& d : di) best = std::max(best, corpus.dsim(e.doc_index, d.doc_index));
    sum_j += best;
  }
  return sum_i / (2.0 * static_cast<double>(di.size())) +
         sum_j / (2.0 * static_cast<double>(dj.size()));
}

double aspect_sim_concat(const SearchEngine& engine, const std::string& a_i,
                         const std::string& a_j, int m) {
  const auto di = engine.search(a_i, m).docs;
  const auto dj = engine.search(a_j, m).docs;
  if (di.empty() || dj.empty()) return 0.0;

  const Corpus& corpus = engine.corpus();
  auto concat = [&](const std::vector<ScoredDoc>& docs) {
    std::string text;
    for (const auto& d : docs) {
      const auto& doc = corpus.doc(d.doc_index);
      text += doc.head + " " + doc.snippet + " ";
    }
    return corpus.vectorize(text);
  };
  auto vi = concat(di);
  auto vj = concat(dj);
  return sparse_cosine(vi, sparse_norm(vi), vj, sparse_norm(vj));
}

std::vector<Document> load_corpus_file(const std::string& path) {
  std::vector<Document> docs;
  for (const auto& line : tsv::read_lines(path)) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("doc_id") || !j.contains("head") ||
        !j.contains("snippet")) {
      throw DataError("bad corpus line: " + line);
    }
    Document d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.head = j.at("head").get<std::string>();
    d.snippet = j.at("snippet").get<std::string>();
    if (j.contains("body")) d.body = j.at("body").get<std::string>();
    if (j.contains("url")) d.url = j.at("url").get<std::string>();
    if (d.head.empty() && d.snippet.empty()) {
      throw DataError("document " + d.doc_id + " has empty head and snippet");
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

Corpus load_corpus(const std::string& path) {
  return Corpus::index(load_corpus_file(path));
}

}  // namespace aspector::retrieval
