#include "aspector/text.hpp"

#include <cctype>

namespace aspector::text {

namespace {

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace

std::string normalize_query(std::string_view raw, std::string_view keep) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    bool retain = false;
    if (is_word_byte(c)) {
      retain = true;
    } else if (keep.find(static_cast<char>(c)) != std::string_view::npos) {
      // kept punctuation survives only between two word characters
      bool prev_ok = i > 0 && is_word_byte(static_cast<unsigned char>(raw[i - 1]));
      bool next_ok = i + 1 < raw.size() && is_word_byte(static_cast<unsigned char>(raw[i + 1]));
      retain = prev_ok && next_ok;
    }
    if (retain) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    std::size_t j = normalized.find(' ', i);
    if (j == std::string_view::npos) j = normalized.size();
    if (j > i) tokens.emplace_back(normalized.substr(i, j - i));
    i = j + 1;
  }
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

bool contains_tokens(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[start + k] != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace aspector::text
