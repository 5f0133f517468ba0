#include "aspector/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace aspector::kb {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return c < 0x80 ? std::tolower(c) : c; });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::string& KnowledgeBase::resolve(const std::string& term) const {
  auto it = redirects.find(term);
  return it == redirects.end() ? term : it->second;
}

KnowledgeBase load_kb(const std::string& entities_path,
                      const std::string& redirects_path,
                      const std::string& disambig_path) {
  KnowledgeBase kb;

  for (const auto& line : tsv::read_lines(entities_path)) {
    auto fields = tsv::split_tab(line);
    if (fields.size() < 2) throw DataError("bad entities row: " + line);
    std::string entity = text::normalize_query(fields[0]);
    std::string klass = trim(fields[1]);
    if (entity.empty() || klass.empty()) throw DataError("bad entities row: " + line);
    auto it = kb.entity_class.find(entity);
    if (it != kb.entity_class.end()) {
      if (lower(it->second) != lower(klass)) {
        throw DataError("entity '" + entity + "' maps to conflicting classes '" +
                        it->second + "' and '" + klass + "'");
      }
      continue;
    }
    kb.entity_class.emplace(entity, klass);
    std::string lc = lower(klass);
    kb.class_members[lc].insert(entity);
    kb.class_display.try_emplace(lc, klass);
  }

  std::map<std::string, std::string> raw_redirects;
  for (const auto& line : tsv::read_lines(redirects_path)) {
    auto fields = tsv::split_tab(line);
    if (fields.size() < 2) throw DataError("bad redirects row: " + line);
    std::string alias = text::normalize_query(fields[0]);
    std::string target = text::normalize_query(fields[1]);
    if (alias.empty() || target.empty()) throw DataError("bad redirects row: " + line);
    raw_redirects[alias] = target;
  }
  // collapse chains to their terminus; any cycle is fatal
  for (const auto& [alias, _] : raw_redirects) {
    std::string cur = alias;
    std::vector<std::string> path{cur};
    while (true) {
      auto it = raw_redirects.find(cur);
      if (it == raw_redirects.end()) break;
      cur = it->second;
      if (std::find(path.begin(), path.end(), cur) != path.end()) {
        std::string cycle;
        for (const auto& p : path) cycle += p + " -> ";
        cycle += cur;
        throw DataError("redirect cycle: " + cycle);
      }
      path.push_back(cur);
    }
    kb.redirects[alias] = cur;
  }

  for (const auto& line : tsv::read_lines(disambig_path)) {
    std::string term = text::normalize_query(line);
    if (!term.empty()) kb.ambiguous.insert(term);
  }
  return kb;
}

std::optional<std::string> lookup_class(const KnowledgeBase& kb,
                                        const std::string& term) {
  const std::string& resolved = kb.resolve(term);
  if (kb.ambiguous.count(resolved)) return std::nullopt;
  auto it = kb.entity_class.find(resolved);
  if (it == kb.entity_class.end()) return std::nullopt;
  return it->second;
}

void save_kb(const KnowledgeBase& kb, const std::string& entities_path,
             const std::string& redirects_path, const std::string& disambig_path) {
  {
    std::ofstream out(entities_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + entities_path);
    for (const auto& [entity, klass] : kb.entity_class) {
      out << entity << '\t' << klass << '\n';
    }
  }
  {
    std::ofstream out(redirects_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + redirects_path);
    for (const auto& [alias, target] : kb.redirects) {
      out << alias << '\t' << target << '\n';
    }
  }
  {
    std::ofstream out(disambig_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + disambig_path);
    for (const auto& term : kb.ambiguous) out << term << '\n';
  }
}

}  // namespace aspector::kb
