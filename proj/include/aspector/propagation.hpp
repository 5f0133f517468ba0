#pragma once

// Class-based aspect propagation over the instance/class bipartite graph:
// class-level distributions from member instances, then per-instance
// smoothing of p_inst with the class distribution.
//
// Both class-level formulas are functions of the injected instance scores
// (p_inst), so the two-pass schedule is a fixed point: re-running a pass
// recomputes identical values.

#include <map>
#include <string>
#include <vector>

#include "aspector/candidates.hpp"
#include "aspector/kb.hpp"

namespace aspector::propagation {

enum class Variant { average, indicator };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);  // throws DataError

// canonical aspect pattern -> probability mass
using PatternDist = std::map<std::string, double>;

struct BipartiteAspectGraph {
  struct InstanceNode {
    candidates::SegmentedQuery query;
    std::string class_key;  // lowercase class [+ " " + property]
  };
  std::vector<InstanceNode> instances;             // ordered by query.full
  std::map<std::string, std::vector<int>> members; // class_key -> instance idx
  std::map<std::string, std::string> class_labels; // class_key -> display label
  double class_to_instance_weight = 0.0;           // K; instance->class edges weigh 1

  struct Excluded {
    candidates::SegmentedQuery query;
    std::string reason;
  };
  std::vector<Excluded> excluded;  // entities the KB could not resolve
};

struct ClassAspectDistribution {
  std::string class_key;
  std::string display_label;
  Variant variant = Variant::average;
  PatternDist weights;
};

// One class node per distinct (class, property) among the resolvable queries;
// unresolvable queries land in `excluded` with a reason.
BipartiteAspectGraph build_graph(const kb::KnowledgeBase& kb,
                                 const std::vector<candidates::SegmentedQuery>& queries,
                                 double K);

// average:   p_class(t) = (1/|C|) * sum over members of p_inst(t)
// indicator: p_class(t) = (1/|C|) * sum over members of [p_inst(t) > 0]
// |C| counts the class node's member instances.
std::vector<ClassAspectDistribution> class_aspects(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant);

// p(t) = (p_inst(t) + K * p_class(t)) / (1 + K) over the union of supports.
PatternDist smooth(const PatternDist& instance_dist, const PatternDist& class_dist,
                   double K);

// Scales the distribution to unit mass; no-op on zero/empty mass.
void normalize(PatternDist& dist);

// Full two-step pass for every instance in the graph. The indicator-variant
// class distribution is renormalized to unit mass before smoothing.
std::map<std::string, PatternDist> propagate(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant,
    double K);

// Runs `passes` full update passes and returns the final per-instance state.
// Pass n >= 2 recomputes the same values (convergence after two iterations).
std::map<std::string, PatternDist> run_passes(
    const BipartiteAspectGraph& graph,
    const std::map<std::string, PatternDist>& instance_dists, Variant variant,
    double K, int passes);

// Persisted class distributions: TSV class_label <TAB> pattern <TAB> weight.
void save_class_dists(const std::vector<ClassAspectDistribution>& dists,
                      const std::string& path);
std::map<std::string, PatternDist> load_class_dists(const std::string& path);

}  // namespace aspector::propagation
