#include "aspector/logmodel.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace aspector::logmodel {

std::int64_t LogStats::follow_count(const std::string& q, const std::string& qj) const {
  auto it = session_follow_counts.find(q);
  if (it == session_follow_counts.end()) return 0;
  auto jt = it->second.find(qj);
  return jt == it->second.end() ? 0 : jt->second;
}

std::int64_t LogStats::count(const std::string& q) const {
  auto it = query_counts.find(q);
  return it == query_counts.end() ? 0 : it->second;
}

std::vector<Session> sessionize(const std::vector<QueryEvent>& events,
                                std::int64_t gap_seconds) {
  std::vector<std::string> user_order;
  std::map<std::string, std::vector<QueryEvent>> per_user;
  for (const auto& e : events) {
    auto [it, inserted] = per_user.try_emplace(e.user_id);
    if (inserted) user_order.push_back(e.user_id);
    it->second.push_back(e);
  }

  std::vector<Session> sessions;
  for (const auto& user : user_order) {
    auto& evs = per_user[user];
    std::stable_sort(evs.begin(), evs.end(),
                     [](const QueryEvent& a, const QueryEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    Session current{user, {}};
    for (auto& e : evs) {
      if (!current.events.empty() &&
          e.timestamp - current.events.back().timestamp >= gap_seconds) {
        sessions.push_back(std::move(current));
        current = Session{user, {}};
      }
      current.events.push_back(std::move(e));
    }
    if (!current.events.empty()) sessions.push_back(std::move(current));
  }
  return sessions;
}

LogStats count_stats(const std::vector<Session>& sessions) {
  LogStats stats;
  for (const auto& s : sessions) {
    std::set<std::pair<const std::string*, const std::string*>,
             bool (*)(const std::pair<const std::string*, const std::string*>&,
                      const std::pair<const std::string*, const std::string*>&)>
        seen([](const auto& a, const auto& b) {
          if (*a.first != *b.first) return *a.first < *b.first;
          return *a.second < *b.second;
        });
    const auto& evs = s.events;
    for (std::size_t i = 0; i < evs.size(); ++i) {
      stats.query_counts[evs[i].query] += 1;
      stats.total_events += 1;
      // "after" is positional, not adjacent-only; once per session per pair
      for (std::size_t j = i + 1; j < evs.size(); ++j) {
        if (evs[i].query == evs[j].query) continue;
        seen.insert({&evs[i].query, &evs[j].query});
      }
    }
    for (const auto& [q, qj] : seen) {
      stats.session_follow_counts[*q][*qj] += 1;
    }
  }
  return stats;
}

LoadReport load_log(const std::string& path) {
  LoadReport report;
  for (const auto& line : tsv::read_lines(path)) {
    auto fields = tsv::split_tab(line);
    if (fields.size() < 3) {
      ++report.dropped_lines;
      continue;
    }
    std::int64_t ts = 0;
    try {
      std::size_t pos = 0;
      ts = std::stoll(fields[1], &pos);
      if (pos != fields[1].size() || ts < 0) {
        ++report.dropped_lines;
        continue;
      }
    } catch (const std::exception&) {
      ++report.dropped_lines;
      continue;
    }
    std::string query = text::normalize_query(fields[2]);
    if (query.empty()) {
      ++report.dropped_lines;
      continue;
    }
    report.events.push_back({fields[0], ts, std::move(query)});
  }
  return report;
}

std::string render_sessions_tsv(const std::vector<Session>& sessions) {
  std::string out;
  std::map<std::string, int> next_index;
  for (const auto& s : sessions) {
    int idx = next_index[s.user_id]++;
    for (const auto& e : s.events) {
      out += s.user_id;
      out += '\t';
      out += std::to_string(idx);
      out += '\t';
      out += std::to_string(e.timestamp);
      out += '\t';
      out += e.query;
      out += '\n';
    }
  }
  return out;
}

}  // namespace aspector::logmodel
