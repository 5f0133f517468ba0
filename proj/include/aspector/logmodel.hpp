#pragma once

// Query-log ingestion: session segmentation and the follow/occurrence counts
// every downstream score reads from.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aspector::logmodel {

struct QueryEvent {
  std::string user_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::string query;           // already normalized
};

struct Session {
  std::string user_id;
  std::vector<QueryEvent> events;  // time-ordered
};

// Immutable after construction; shareable across threads read-only.
struct LogStats {
  // f_s(q, q_j): number of distinct sessions where q_j occurs after q.
  // Self-pairs (q_j == q) are not stored.
  std::map<std::string, std::map<std::string, std::int64_t>> session_follow_counts;
  // f(q): raw event occurrences of q over all sessions.
  std::map<std::string, std::int64_t> query_counts;
  std::int64_t total_events = 0;

  std::int64_t follow_count(const std::string& q, const std::string& qj) const;
  std::int64_t count(const std::string& q) const;
  bool has_query(const std::string& q) const { return query_counts.count(q) != 0; }
};

// Splits per-user event streams at inactivity gaps of gap_seconds or more.
// Events are stably ordered by timestamp within each user before splitting.
// Sessions come out grouped by user in first-appearance order.
std::vector<Session> sessionize(const std::vector<QueryEvent>& events,
                                std::int64_t gap_seconds);

LogStats count_stats(const std::vector<Session>& sessions);

struct LoadReport {
  std::vector<QueryEvent> events;
  std::int64_t dropped_lines = 0;  // unparsable timestamps / short rows / empty queries
};

// TSV log format: user_id <TAB> timestamp <TAB> query. '#' lines ignored.
// Queries are normalized on load; rows that normalize to empty are dropped.
LoadReport load_log(const std::string& path);

// Writes sessions as TSV: user_id, session index (per user), timestamp, query.
std::string render_sessions_tsv(const std::vector<Session>& sessions);

}  // namespace aspector::logmodel
