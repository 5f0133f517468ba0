#pragma once

// Full per-query run: candidates -> propagation -> dedup -> grouping ->
// selection, plus the suite driver and global configuration.

#include <map>
#include <string>
#include <vector>

#include "aspector/candidates.hpp"
#include "aspector/dedup.hpp"
#include "aspector/grouping.hpp"
#include "aspector/kb.hpp"
#include "aspector/logmodel.hpp"
#include "aspector/propagation.hpp"
#include "aspector/retrieval.hpp"

namespace aspector::pipeline {

struct Config {
  double K = 0.1;
  double sigma = 0.35;
  int m = 8;                    // documents per aspect retrieval
  int n = 8;                    // output budget
  int N = 50;                   // original-query depth for coverage
  int coverage_k = 1;
  int candidate_cap = 30;
  std::int64_t session_gap_seconds = 1800;
  propagation::Variant variant = propagation::Variant::indicator;
  int topic_T = 32;
  int threads = 1;
  bool concat_similarity = false;  // comparison-only aspect measure

  // throws DataError when a bound is violated
  void validate() const;
  // key=value lines, '#' comments; unknown keys are fatal
  static Config from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
};

struct AspectProvenance {
  std::string surface;
  std::string pattern;
  double p_r = 0.0;
  double p_ss = 0.0;
  double p_inst = 0.0;
  double p_class = 0.0;
  double p = 0.0;
  candidates::Origin origin = candidates::Origin::propagated;
};

struct AspectReport {
  candidates::SegmentedQuery query;
  bool empty = false;  // no candidates and no class
  std::vector<grouping::AspectGroup> selected;
  std::vector<dedup::AspectCluster> clusters;
  std::vector<AspectProvenance> provenance;
  struct Diagnostics {
    std::vector<std::pair<std::string, std::string>> excluded_entities;
    std::vector<std::string> empty_retrievals;
    std::vector<std::string> warnings;
  } diagnostics;

  // surfaces standing in for the ranked groups (vertical groups are
  // represented by their best member's retrieval)
  std::vector<std::string> selected_representatives() const;
};

AspectReport run_query(const candidates::SegmentedQuery& q,
                       const logmodel::LogStats& stats, const kb::KnowledgeBase& kb,
                       const retrieval::SearchEngine& engine, const Config& config);

// Machine form: full-precision scores, no wall-clock data.
std::string report_to_json(const AspectReport& report);
// Human form: 4-decimal scores; elapsed_ms < 0 omits the timing line.
std::string report_to_text(const AspectReport& report, double elapsed_ms = -1.0);

// Query file: TSV full <TAB> entity <TAB> property(optional).
std::vector<candidates::SegmentedQuery> load_queries(const std::string& path);

struct SuiteResult {
  int queries_run = 0;
  int failures = 0;
  std::vector<std::string> report_paths;
};

// One report (JSON + text) per query under out_dir/reports, plus nsim.csv,
// coverage.csv and suite.csv. Per-query failures are recorded and the suite
// continues. Deterministic output for any thread count.
SuiteResult run_suite(const std::vector<candidates::SegmentedQuery>& queries,
                      const logmodel::LogStats& stats, const kb::KnowledgeBase& kb,
                      const retrieval::SearchEngine& engine, const Config& config,
                      const std::string& out_dir);

}  // namespace aspector::pipeline
