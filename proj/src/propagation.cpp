#include "aspector/propagation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include "aspector/tsv.hpp"

namespace aspector::propagation {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return c < 0x80 ? std::tolower(c) : c; });
  return s;
}

}  // namespace

const char* variant_name(Variant v) {
  return v == Variant::average ? "average" : "indicator";
}

Variant parse_variant(const std::string& name) {
  if (name == "average") return Variant::average;
  if (name == "indicator") return Variant::indicator;
  throw DataError("unknown propagation variant: " + name);
}

BipartiteAspectGraph build_graph(const kb::KnowledgeBase& kb,
                                 const std::vector<candidates::SegmentedQuery>& queries,
                                 double K) {
  BipartiteAspectGraph graph;
  graph.class_to_instance_weight = K;

  std::vector<candidates::SegmentedQuery> sorted = queries;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.full < b.full; });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const auto& a, const auto& b) { return a.full == b.full; }),
               sorted.end());

  for (const auto& q : sorted) {
    auto klass = kb::lookup_class(kb, q.entity);
    if (!klass) {
      std::string reason = kb.ambiguous.count(kb.resolve(q.entity))
                               ? "ambiguous entity"
                               : "entity not in knowledge base";
      graph.excluded.push_back({q, reason});
      continue;
    }
    std::string key = lower(*klass);
    std::string label = *klass;
    if (!q.property.empty()) {
      key += " " + q.property;
      label += " " + q.property;
    }
    int idx = static_cast<int>(graph.instances.size());
    graph.instances.push_back({q, key});
    graph.members[key].push_back(idx);
    graph.class_labels.try_emplace(key, label);
  }
  return graph;
}

std::vector<ClassAspectDistribution> class_aspects(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant) {
  std::vector<ClassAspectDistribution> out;
  for (const auto& [key, member_idx] : graph.members) {
    ClassAspectDistribution dist;
    dist.class_key = key;
    dist.display_label = graph.class_labels.at(key);
    dist.variant = variant;
    const double inv_c = 1.0 / static_cast<double>(member_idx.size());
    for (int idx : member_idx) {
      const auto& q = graph.instances[static_cast<std::size_t>(idx)].query;
      auto it = instance_dists.find(q.full);
      if (it == instance_dists.end()) continue;
      for (const auto& [pattern, p] : it->second) {
        if (variant == Variant::average) {
          dist.weights[pattern] += inv_c * p;
        } else if (p > 0.0) {
          dist.weights[pattern] += inv_c;
        }
      }
    }
    out.push_back(std::move(dist));
  }
  return out;
}

PatternDist smooth(const PatternDist& instance_dist, const PatternDist& class_dist,
                   double K) {
  PatternDist out;
  const double denom = 1.0 + K;
  for (const auto& [pattern, p_inst] : instance_dist) {
    auto it = class_dist.find(pattern);
    double p_class = it == class_dist.end() ? 0.0 : it->second;
    out[pattern] = (p_inst + K * p_class) / denom;
  }
  for (const auto& [pattern, p_class] : class_dist) {
    if (out.count(pattern)) continue;
    out[pattern] = (K * p_class) / denom;
  }
  return out;
}

void normalize(PatternDist& dist) {
  double total = 0.0;
  for (const auto& [_, v] : dist) total += v;
  if (total <= 0.0) return;
  for (auto& [_, v] : dist) v /= total;
}

std::map<std::string, PatternDist> propagate(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant,
    double K) {
  auto class_dists = class_aspects(graph, instance_dists, variant);
  std::map<std::string, const PatternDist*> by_key;
  std::map<std::string, PatternDist> renormalized;
  for (auto& dist : class_dists) {
    if (variant == Variant::indicator) {
      PatternDist copy = dist.weights;
      normalize(copy);
      by_key[dist.class_key] = &(renormalized[dist.class_key] = std::move(copy));
    } else {
      by_key[dist.class_key] = &dist.weights;
    }
  }

  static const PatternDist kEmpty;
  std::map<std::string, PatternDist> out;
  for (const auto& node : graph.instances) {
    auto inst_it = instance_dists.find(node.query.full);
    const PatternDist& inst = inst_it == instance_dists.end() ? kEmpty : inst_it->second;
    out[node.query.full] = smooth(inst, *by_key.at(node.class_key), K);
  }
  return out;
}

std::map<std::string, PatternDist> run_passes(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant,
    double K, int passes) {
  std::map<std::string, PatternDist> state;
  for (int i = 0; i < passes; ++i) {
    state = propagate(graph, instance_dists, variant, K);
  }
  return state;
}

void save_class_dists(const std::vector<ClassAspectDistribution>& dists,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  char buf[32];
  for (const auto& dist : dists) {
    for (const auto& [pattern, w] : dist.weights) {
      std::snprintf(buf, sizeof(buf), "%.17g", w);
      out << dist.class_key << '\t' << pattern << '\t' << buf << '\n';
    }
  }
}

std::map<std::string, PatternDist> load_class_dists(const std::string& path) {
  std::map<std::string, PatternDist> out;
  for (const auto& line : tsv::read_lines(path)) {
    auto fields = tsv::split_tab(line);
    if (fields.size() != 3) throw DataError("bad class-dist row: " + line);
    try {
      out[fields[0]][fields[1]] = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw DataError("bad class-dist weight: " + line);
    }
  }
  return out;
}

}  // namespace aspector::propagation
