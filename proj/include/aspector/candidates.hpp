#pragma once

// Instance-level candidate aspects: refinements from session co-occurrence,
// super-strings from the log vocabulary, and the fused p_inst distribution.

#include <map>
#include <string>
#include <vector>

#include "aspector/logmodel.hpp"

namespace aspector::candidates {

inline constexpr const char* kEntityPlaceholder = "<E>";

struct SegmentedQuery {
  std::string full;      // entity or "entity property"
  std::string entity;
  std::string property;  // empty when the query is the bare entity

  static SegmentedQuery make(std::string entity, std::string property);
};

enum class Origin { refinement, superstring, both, propagated };

const char* origin_name(Origin o);

struct CandidateAspect {
  std::string surface;
  std::string canonical;  // surface with the entity tokens replaced by "<E>"
  double p_r = 0.0;
  double p_ss = 0.0;
  double p_inst = 0.0;
  Origin origin = Origin::refinement;
};

// p_r(q_j|q) = f_s(q, q_j) / sum_i f_s(q, q_i). Empty when q has no follows.
std::map<std::string, double> refinements(const logmodel::LogStats& stats,
                                          const std::string& q);

// Candidates are vocabulary queries whose token sequence contains q's tokens
// contiguously (q itself excluded).
// p_ss(q_j|q) = f(q_j) / (f(q) + sum_i f(q_i)), sum over all super-strings.
std::map<std::string, double> superstrings(const logmodel::LogStats& stats,
                                           const std::string& q);

// Union of both sources, raw score max(p_r, p_ss), top-cap kept (ties broken
// lexicographically), kept scores renormalized to p_inst. Output ordered by
// p_inst descending then surface.
std::vector<CandidateAspect> instance_aspects(const logmodel::LogStats& stats,
                                              const SegmentedQuery& q, int cap);

// "<E>"-abstracted pattern: every contiguous occurrence of the entity token
// run is replaced by the placeholder. Surfaces without the entity pass
// through unchanged.
std::string canonicalize(const std::string& surface, const std::string& entity);

// Inverse of canonicalize for a single pattern: placeholder -> entity tokens.
std::string instantiate(const std::string& pattern, const std::string& entity);

}  // namespace aspector::candidates
