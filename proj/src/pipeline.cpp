#include "aspector/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "aspector/eval.hpp"
#include "aspector/selection.hpp"
#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace aspector::pipeline {

namespace {

using Json = nlohmann::ordered_json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return c < 0x80 ? std::tolower(c) : c; });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("config: bad value for " + key + ": " + value);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("config: bad value for " + key + ": " + value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw DataError("config: bad value for " + key + ": " + value);
}

}  // namespace

void Config::validate() const {
  if (K < 0.0) throw DataError("config: K must be >= 0");
  if (sigma < 0.0 || sigma > 1.0) throw DataError("config: sigma must be in [0,1]");
  if (m < 1) throw DataError("config: m must be >= 1");
  if (n < 1) throw DataError("config: n must be >= 1");
  if (N < 1) throw DataError("config: N must be >= 1");
  if (coverage_k < 1) throw DataError("config: coverage_k must be >= 1");
  if (candidate_cap < 1) throw DataError("config: candidate_cap must be >= 1");
  if (session_gap_seconds <= 0) throw DataError("config: session_gap_seconds must be > 0");
  if (topic_T < 1) throw DataError("config: topic_T must be >= 1");
  if (threads < 1) throw DataError("config: threads must be >= 1");
}

void Config::set(const std::string& key, const std::string& value) {
  if (key == "K") K = parse_double(key, value);
  else if (key == "sigma") sigma = parse_double(key, value);
  else if (key == "m") m = static_cast<int>(parse_int(key, value));
  else if (key == "n") n = static_cast<int>(parse_int(key, value));
  else if (key == "N") N = static_cast<int>(parse_int(key, value));
  else if (key == "coverage_k") coverage_k = static_cast<int>(parse_int(key, value));
  else if (key == "candidate_cap") candidate_cap = static_cast<int>(parse_int(key, value));
  else if (key == "session_gap_seconds") session_gap_seconds = parse_int(key, value);
  else if (key == "variant") variant = propagation::parse_variant(value);
  else if (key == "topic_T") topic_T = static_cast<int>(parse_int(key, value));
  else if (key == "threads") threads = static_cast<int>(parse_int(key, value));
  else if (key == "concat_similarity") concat_similarity = parse_bool(key, value);
  else throw DataError("config: unknown key: " + key);
}

Config Config::from_file(const std::string& path) {
  Config config;
  for (const auto& line : tsv::read_lines(path)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("config: bad line: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      std::size_t b = s.find_first_not_of(" \t");
      std::size_t e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    strip(key);
    strip(value);
    config.set(key, value);
  }
  config.validate();
  return config;
}

std::vector<std::string> AspectReport::selected_representatives() const {
  std::vector<std::string> reps;
  reps.reserve(selected.size());
  for (const auto& g : selected) reps.push_back(g.representative);
  return reps;
}

AspectReport run_query(const candidates::SegmentedQuery& q,
                       const logmodel::LogStats& stats, const kb::KnowledgeBase& kb,
                       const retrieval::SearchEngine& engine, const Config& config) {
  AspectReport report;
  report.query = q;

  const auto own = candidates::instance_aspects(stats, q, config.candidate_cap);
  propagation::PatternDist own_dist;
  for (const auto& c : own) own_dist[c.canonical] += c.p_inst;

  auto klass = kb::lookup_class(kb, q.entity);

  propagation::PatternDist final_dist;
  propagation::PatternDist class_dist_used;
  if (config.K > 0.0 && klass) {
    // sibling queries for every class member, with q standing in for its
    // canonical form so its own log statistics are used
    const std::string canonical = kb.resolve(q.entity);
    std::vector<candidates::SegmentedQuery> graph_queries{q};
    for (const auto& member : kb.class_members.at(lower(*klass))) {
      if (member == canonical || member == q.entity) continue;
      graph_queries.push_back(candidates::SegmentedQuery::make(member, q.property));
    }
    auto graph = propagation::build_graph(kb, graph_queries, config.K);
    for (const auto& ex : graph.excluded) {
      report.diagnostics.excluded_entities.emplace_back(ex.query.entity, ex.reason);
    }

    std::map<std::string, propagation::PatternDist> instance_dists;
    instance_dists[q.full] = own_dist;
    for (const auto& node : graph.instances) {
      if (node.query.full == q.full) continue;
      propagation::PatternDist dist;
      for (const auto& c :
           candidates::instance_aspects(stats, node.query, config.candidate_cap)) {
        dist[c.canonical] += c.p_inst;
      }
      instance_dists[node.query.full] = std::move(dist);
    }

    auto class_dists = propagation::class_aspects(graph, instance_dists, config.variant);
    std::string q_key;
    for (const auto& node : graph.instances) {
      if (node.query.full == q.full) q_key = node.class_key;
    }
    for (auto& dist : class_dists) {
      if (dist.class_key != q_key) continue;
      class_dist_used = dist.weights;
      if (config.variant == propagation::Variant::indicator) {
        propagation::normalize(class_dist_used);
      }
      break;
    }
    final_dist = propagation::smooth(own_dist, class_dist_used, config.K);
  } else {
    // K = 0 or unresolvable entity: p_inst carries through untouched
    final_dist = own_dist;
    if (!klass) {
      std::string reason = kb.ambiguous.count(kb.resolve(q.entity))
                               ? "ambiguous entity"
                               : "entity not in knowledge base";
      report.diagnostics.excluded_entities.emplace_back(q.entity, reason);
    }
  }

  if (final_dist.empty()) {
    report.empty = true;
    report.diagnostics.warnings.push_back("no candidates and no class patterns for query");
    return report;
  }

  // back to surfaces; distinct patterns may instantiate identically
  std::map<std::string, double> surface_p;
  std::map<std::string, std::string> surface_pattern;
  for (const auto& [pattern, p] : final_dist) {
    std::string surface = candidates::instantiate(pattern, q.entity);
    surface_p[surface] += p;
    auto it = surface_pattern.find(surface);
    if (it == surface_pattern.end() || final_dist.at(it->second) < p) {
      surface_pattern[surface] = pattern;
    }
  }

  std::map<std::string, const candidates::CandidateAspect*> own_by_surface;
  for (const auto& c : own) own_by_surface[c.surface] = &c;
  for (const auto& [surface, p] : surface_p) {
    AspectProvenance prov;
    prov.surface = surface;
    prov.pattern = surface_pattern.at(surface);
    prov.p = p;
    auto cit = class_dist_used.find(prov.pattern);
    if (cit != class_dist_used.end()) prov.p_class = cit->second;
    auto iit = own_dist.find(prov.pattern);
    if (iit != own_dist.end()) prov.p_inst = iit->second;
    auto oit = own_by_surface.find(surface);
    if (oit != own_by_surface.end()) {
      prov.p_r = oit->second->p_r;
      prov.p_ss = oit->second->p_ss;
      prov.origin = oit->second->origin;
    } else {
      prov.origin = candidates::Origin::propagated;
    }
    report.provenance.push_back(std::move(prov));
  }
  std::sort(report.provenance.begin(), report.provenance.end(),
            [](const AspectProvenance& a, const AspectProvenance& b) {
              if (a.p != b.p) return a.p > b.p;
              return a.surface < b.surface;
            });

  std::vector<std::string> surfaces;
  surfaces.reserve(surface_p.size());
  for (const auto& [surface, _] : surface_p) surfaces.push_back(surface);

  auto matrix = dedup::similarity_matrix(engine, surfaces, config.m, config.threads,
                                         config.concat_similarity);
  for (const auto& surface : surfaces) {
    if (engine.search(surface, config.m).docs.empty()) {
      report.diagnostics.empty_retrievals.push_back(surface);
    }
  }
  report.clusters = dedup::cluster(matrix, surface_p, config.sigma);

  auto groups = grouping::group_by_class(report.clusters, kb, q.entity);

  selection::SelectionInput input;
  input.groups = std::move(groups);
  input.sim = std::move(matrix);
  input.n = config.n;
  report.selected = selection::select(input);
  return report;
}

namespace {

Json group_to_json(const grouping::AspectGroup& g) {
  Json jg;
  jg["label"] = g.display_label;
  jg["vertical"] = g.is_vertical;
  jg["score"] = g.group_score;
  jg["representative"] = g.representative;
  Json members = Json::array();
  for (const auto& c : g.members) {
    Json jc;
    jc["label"] = c.label;
    jc["score"] = c.label_score;
    jc["members"] = c.members;
    members.push_back(std::move(jc));
  }
  jg["members"] = std::move(members);
  if (g.is_vertical) jg["member_entities"] = g.member_entities;
  return jg;
}

}  // namespace

std::string report_to_json(const AspectReport& report) {
  Json j;
  j["query"] = {{"full", report.query.full},
                {"entity", report.query.entity},
                {"property", report.query.property}};
  j["status"] = report.empty ? "empty" : "ok";

  Json selected = Json::array();
  for (std::size_t i = 0; i < report.selected.size(); ++i) {
    Json jg = group_to_json(report.selected[i]);
    jg["rank"] = i + 1;
    selected.push_back(std::move(jg));
  }
  j["selected"] = std::move(selected);

  Json clusters = Json::array();
  for (const auto& c : report.clusters) {
    Json jc;
    jc["label"] = c.label;
    jc["score"] = c.label_score;
    jc["members"] = c.members;
    clusters.push_back(std::move(jc));
  }
  j["clusters"] = std::move(clusters);

  Json prov = Json::array();
  for (const auto& p : report.provenance) {
    Json jp;
    jp["surface"] = p.surface;
    jp["pattern"] = p.pattern;
    jp["p_r"] = p.p_r;
    jp["p_ss"] = p.p_ss;
    jp["p_inst"] = p.p_inst;
    jp["p_class"] = p.p_class;
    jp["p"] = p.p;
    jp["origin"] = candidates::origin_name(p.origin);
    prov.push_back(std::move(jp));
  }
  j["provenance"] = std::move(prov);

  Json diag;
  Json excluded = Json::array();
  for (const auto& [entity, reason] : report.diagnostics.excluded_entities) {
    excluded.push_back({{"entity", entity}, {"reason", reason}});
  }
  diag["excluded_entities"] = std::move(excluded);
  diag["empty_retrievals"] = report.diagnostics.empty_retrievals;
  diag["warnings"] = report.diagnostics.warnings;
  j["diagnostics"] = std::move(diag);
  return j.dump(2) + "\n";
}

std::string report_to_text(const AspectReport& report, double elapsed_ms) {
  char buf[64];
  std::string out;
  out += "query: " + report.query.full + "\n";
  out += "status: " + std::string(report.empty ? "empty" : "ok") + "\n";
  out += "aspects:\n";
  for (std::size_t i = 0; i < report.selected.size(); ++i) {
    const auto& g = report.selected[i];
    std::snprintf(buf, sizeof(buf), "  %2zu. %-40s p=%.4f", i + 1,
                  g.display_label.c_str(), g.group_score);
    out += buf;
    if (g.is_vertical) {
      out += "  [group:";
      for (const auto& m : g.members) out += " " + m.label;
      out += "]";
    }
    out += "\n";
  }
  out += "clusters:\n";
  for (const auto& c : report.clusters) {
    std::snprintf(buf, sizeof(buf), "  p=%.4f ", c.label_score);
    out += buf;
    out += c.label + " <-";
    for (const auto& m : c.members) out += " " + m;
    out += "\n";
  }
  if (!report.diagnostics.excluded_entities.empty()) {
    out += "excluded entities:\n";
    for (const auto& [entity, reason] : report.diagnostics.excluded_entities) {
      out += "  " + entity + ": " + reason + "\n";
    }
  }
  if (!report.diagnostics.empty_retrievals.empty()) {
    out += "aspects with empty retrieval:";
    for (const auto& a : report.diagnostics.empty_retrievals) out += " " + a;
    out += "\n";
  }
  for (const auto& w : report.diagnostics.warnings) out += "warning: " + w + "\n";
  if (elapsed_ms >= 0.0) {
    std::snprintf(buf, sizeof(buf), "elapsed_ms: %.1f\n", elapsed_ms);
    out += buf;
  }
  return out;
}

std::vector<candidates::SegmentedQuery> load_queries(const std::string& path) {
  std::vector<candidates::SegmentedQuery> queries;
  for (const auto& line : tsv::read_lines(path)) {
    auto fields = tsv::split_tab(line);
    if (fields.size() < 2) throw DataError("bad query row: " + line);
    candidates::SegmentedQuery q;
    q.full = text::normalize_query(fields[0]);
    q.entity = text::normalize_query(fields[1]);
    q.property = fields.size() > 2 ? text::normalize_query(fields[2]) : "";
    if (q.entity.empty() || q.full.empty()) throw DataError("bad query row: " + line);
    std::string expect = q.property.empty() ? q.entity : q.entity + " " + q.property;
    if (q.full != expect) {
      throw DataError("query row is not entity[+property]: " + line);
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

SuiteResult run_suite(const std::vector<candidates::SegmentedQuery>& queries,
                      const logmodel::LogStats& stats, const kb::KnowledgeBase& kb,
                      const retrieval::SearchEngine& engine, const Config& config,
                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (queries.empty()) return {};
  fs::create_directories(fs::path(out_dir) / "reports");

  const auto model = eval::build_topic_model(engine.corpus(), config.topic_T);

  struct Row {
    AspectReport report;
    double elapsed_ms = 0.0;
    std::string error;
  };
  std::vector<Row> rows(queries.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= queries.size()) break;
      auto start = std::chrono::steady_clock::now();
      try {
        rows[i].report = run_query(queries[i], stats, kb, engine, config);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
        rows[i].report.query = queries[i];
        rows[i].report.empty = true;
      }
      rows[i].elapsed_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
    }
  };
  if (config.threads <= 1 || queries.size() < 2) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SuiteResult result;
  result.queries_run = static_cast<int>(queries.size());

  std::string nsim_csv = "query,n_selected,nsim_selected,n_refinements,nsim_refinements,note\n";
  std::string coverage_csv = "query,k,N,aspect_docs,overlap,new_docs,vacuous\n";
  std::string suite_csv = "query,status,selected,error\n";

  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    const auto& row = rows[i];

    std::string slug;
    for (char c : q.full) slug += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%03zu_", i);
    fs::path base = fs::path(out_dir) / "reports" / (prefix + slug);

    {
      std::ofstream out(base.string() + ".json", std::ios::binary);
      out << report_to_json(row.report);
      std::ofstream txt(base.string() + ".txt", std::ios::binary);
      txt << report_to_text(row.report, row.elapsed_ms);
    }
    result.report_paths.push_back(base.string() + ".json");

    if (!row.error.empty()) ++result.failures;
    std::string status = !row.error.empty() ? "error" : (row.report.empty ? "empty" : "ok");
    suite_csv += q.full + "," + status + "," + std::to_string(row.report.selected.size()) +
                 "," + row.error + "\n";
    if (!row.error.empty()) continue;

    // orthogonality: selected representatives vs raw top-n refinements
    std::string note;
    std::string nsim_selected, nsim_refinements;
    auto reps = row.report.selected_representatives();
    std::vector<std::pair<double, std::string>> refs;
    for (const auto& [qj, pr] : candidates::refinements(stats, q.full)) {
      refs.emplace_back(pr, qj);
    }
    std::sort(refs.begin(), refs.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (refs.size() > static_cast<std::size_t>(config.n)) {
      refs.resize(static_cast<std::size_t>(config.n));
    }
    std::vector<std::string> raw;
    for (const auto& [_, qj] : refs) raw.push_back(qj);

    try {
      if (reps.size() >= 2) {
        nsim_selected = eval::fixed6(eval::nsim(engine, model, reps, config.m));
      } else {
        note = "fewer than 2 selected aspects";
      }
      if (raw.size() >= 2) {
        nsim_refinements = eval::fixed6(eval::nsim(engine, model, raw, config.m));
      } else if (note.empty()) {
        note = "fewer than 2 refinements";
      }
    } catch (const eval::MetricError& e) {
      note = e.what();
    }
    nsim_csv += q.full + "," + std::to_string(reps.size()) + "," + nsim_selected + "," +
                std::to_string(raw.size()) + "," + nsim_refinements + "," + note + "\n";

    auto coverage =
        eval::coverage_overlap(engine, q.full, reps, config.coverage_k, config.N);
    coverage_csv += q.full + "," + std::to_string(config.coverage_k) + "," +
                    std::to_string(config.N) + "," +
                    std::to_string(coverage.aspect_docs.size()) + "," +
                    eval::fixed6(coverage.overlap) + "," +
                    std::to_string(coverage.new_docs.size()) + "," +
                    (coverage.vacuous ? "1" : "0") + "\n";
  }

  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out((fs::path(out_dir) / name).string(), std::ios::binary);
    if (!out) throw DataError(std::string("cannot write suite file ") + name);
    out << content;
  };
  write("nsim.csv", nsim_csv);
  write("coverage.csv", coverage_csv);
  write("suite.csv", suite_csv);
  return result;
}

}  // namespace aspector::pipeline
