#include "aspector/candidates.hpp"

#include <algorithm>

#include "aspector/text.hpp"

namespace aspector::candidates {

SegmentedQuery SegmentedQuery::make(std::string entity, std::string property) {
  SegmentedQuery q;
  q.entity = std::move(entity);
  q.property = std::move(property);
  q.full = q.property.empty() ? q.entity : q.entity + " " + q.property;
  return q;
}

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::refinement: return "refinement";
    case Origin::superstring: return "superstring";
    case Origin::both: return "both";
    case Origin::propagated: return "propagated";
  }
  return "?";
}

std::map<std::string, double> refinements(const logmodel::LogStats& stats,
                                          const std::string& q) {
  std::map<std::string, double> out;
  auto it = stats.session_follow_counts.find(q);
  if (it == stats.session_follow_counts.end()) return out;
  double total = 0.0;
  for (const auto& [qj, fs] : it->second) total += static_cast<double>(fs);
  if (total <= 0.0) return out;
  for (const auto& [qj, fs] : it->second) {
    out[qj] = static_cast<double>(fs) / total;
  }
  return out;
}

std::map<std::string, double> superstrings(const logmodel::LogStats& stats,
                                           const std::string& q) {
  std::map<std::string, double> out;
  const auto q_tokens = text::tokenize(q);
  if (q_tokens.empty()) return out;

  std::vector<std::pair<const std::string*, std::int64_t>> supers;
  double sum_f = 0.0;
  for (const auto& [qj, f] : stats.query_counts) {
    if (qj == q) continue;
    if (!text::contains_tokens(text::tokenize(qj), q_tokens)) continue;
    supers.emplace_back(&qj, f);
    sum_f += static_cast<double>(f);
  }
  if (supers.empty()) return out;

  // footnote-style lower bound: the denominator also carries f(q)
  const double denom = static_cast<double>(stats.count(q)) + sum_f;
  for (const auto& [qj, f] : supers) {
    out[*qj] = static_cast<double>(f) / denom;
  }
  return out;
}

std::vector<CandidateAspect> instance_aspects(const logmodel::LogStats& stats,
                                              const SegmentedQuery& q, int cap) {
  const auto p_r = refinements(stats, q.full);
  const auto p_ss = superstrings(stats, q.full);

  std::vector<CandidateAspect> all;
  for (const auto& [surface, pr] : p_r) {
    CandidateAspect c;
    c.surface = surface;
    c.p_r = pr;
    auto it = p_ss.find(surface);
    if (it != p_ss.end()) {
      c.p_ss = it->second;
      c.origin = Origin::both;
    } else {
      c.origin = Origin::refinement;
    }
    all.push_back(std::move(c));
  }
  for (const auto& [surface, pss] : p_ss) {
    if (p_r.count(surface)) continue;
    CandidateAspect c;
    c.surface = surface;
    c.p_ss = pss;
    c.origin = Origin::superstring;
    all.push_back(std::move(c));
  }

  auto raw = [](const CandidateAspect& c) { return std::max(c.p_r, c.p_ss); };
  std::sort(all.begin(), all.end(), [&](const CandidateAspect& a, const CandidateAspect& b) {
    if (raw(a) != raw(b)) return raw(a) > raw(b);
    return a.surface < b.surface;
  });
  if (cap >= 0 && all.size() > static_cast<std::size_t>(cap)) {
    all.resize(static_cast<std::size_t>(cap));
  }

  double total = 0.0;
  for (const auto& c : all) total += raw(c);
  for (auto& c : all) {
    c.p_inst = total > 0.0 ? raw(c) / total : 0.0;
    c.canonical = canonicalize(c.surface, q.entity);
  }
  return all;
}

std::string canonicalize(const std::string& surface, const std::string& entity) {
  const auto s_tokens = text::tokenize(surface);
  const auto e_tokens = text::tokenize(entity);
  if (e_tokens.empty() || e_tokens.size() > s_tokens.size()) return surface;

  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s_tokens.size()) {
    bool match = i + e_tokens.size() <= s_tokens.size();
    for (std::size_t k = 0; match && k < e_tokens.size(); ++k) {
      if (s_tokens[i + k] != e_tokens[k]) match = false;
    }
    if (match) {
      out.emplace_back(kEntityPlaceholder);
      i += e_tokens.size();
    } else {
      out.push_back(s_tokens[i]);
      ++i;
    }
  }
  return text::join(out);
}

std::string instantiate(const std::string& pattern, const std::string& entity) {
  std::vector<std::string> out;
  for (auto& tok : text::tokenize(pattern)) {
    if (tok == kEntityPlaceholder) {
      for (auto& e : text::tokenize(entity)) out.push_back(std::move(e));
    } else {
      out.push_back(std::move(tok));
    }
  }
  return text::join(out);
}

}  // namespace aspector::candidates
