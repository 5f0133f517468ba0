#pragma once

// Local stand-in for the web search engine: TF-IDF index over head+snippet,
// ranked retrieval, and the document / aspect similarity measures.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace aspector::retrieval {

struct Document {
  std::string doc_id;
  std::string head;
  std::string snippet;
  std::string body;  // optional; excluded from similarity
  std::string url;   // optional
};

struct ScoredDoc {
  int doc_index = -1;
  double score = 0.0;
};

struct RetrievalResult {
  std::string query;
  std::vector<ScoredDoc> docs;  // score descending, doc_id ascending on ties
};

// Frozen after indexing. Term statistics cover head+snippet only.
class Corpus {
 public:
  static Corpus index(std::vector<Document> documents);

  std::size_t size() const { return docs_.size(); }
  const Document& doc(int index) const { return docs_[static_cast<std::size_t>(index)]; }
  const std::vector<Document>& documents() const { return docs_; }
  int doc_index(const std::string& doc_id) const;  // -1 when absent

  std::size_t term_count() const { return terms_.size(); }
  const std::string& term(int term_id) const { return terms_[static_cast<std::size_t>(term_id)]; }
  std::int64_t df(const std::string& term) const;
  double idf(int term_id) const { return idfs_[static_cast<std::size_t>(term_id)]; }

  // sorted (term_id, tf*idf) pairs for one document
  const std::vector<std::pair<int, double>>& doc_vector(int index) const {
    return doc_vecs_[static_cast<std::size_t>(index)];
  }
  double doc_norm(int index) const { return doc_norms_[static_cast<std::size_t>(index)]; }

  // TF-IDF vector for arbitrary text; unseen terms are dropped.
  std::vector<std::pair<int, double>> vectorize(const std::string& text) const;

  RetrievalResult search(const std::string& query, int m) const;

  // Cosine of the two documents' TF-IDF vectors; 0 when either is zero.
  double dsim(int doc_a, int doc_b) const;

 private:
  std::vector<Document> docs_;
  std::map<std::string, int> doc_ids_;
  std::vector<std::string> terms_;
  std::map<std::string, int> term_ids_;
  std::vector<std::int64_t> dfs_;
  std::vector<double> idfs_;
  std::vector<std::vector<std::pair<int, double>>> doc_vecs_;
  std::vector<double> doc_norms_;
  std::vector<std::vector<std::pair<int, double>>> postings_;  // term -> (doc, w)
};

double dsim(const Document& d1, const Document& d2, const Corpus& corpus);

// Caching front end. Also honors a pinned query -> doc_id list so tests can
// fix retrieval exactly. Thread-safe.
class SearchEngine {
 public:
  explicit SearchEngine(const Corpus& corpus) : corpus_(&corpus) {}

  const Corpus& corpus() const { return *corpus_; }

  RetrievalResult search(const std::string& query, int m) const;

  void pin(const std::string& query, const std::vector<std::string>& doc_ids);
  // JSON-lines {"query": ..., "doc_ids": [...]}
  void load_cache(const std::string& path);

 private:
  const Corpus* corpus_;
  std::map<std::string, std::vector<int>> pinned_;
  mutable std::map<std::pair<std::string, int>, RetrievalResult> memo_;
  mutable std::mutex mu_;
};

// Average best-match similarity between the two aspects' top-m result sets:
//   sim = sum_i max_j dsim / (2|D_i|) + sum_j max_i dsim / (2|D_j|)
// Defined as 0 when either retrieval is empty.
double aspect_sim(const SearchEngine& engine, const std::string& a_i,
                  const std::string& a_j, int m);

// Alternative measure: each result set concatenated into one document.
// Kept for comparison runs only.
double aspect_sim_concat(const SearchEngine& engine, const std::string& a_i,
                         const std::string& a_j, int m);

// Corpus file: JSON-lines with doc_id, head, snippet, optional body/url.
std::vector<Document> load_corpus_file(const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace aspector::retrieval
