#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aspector::text {

// Canonical query form: ASCII-lowercased, punctuation stripped (characters in
// `keep` survive between two alphanumeric neighbours), whitespace collapsed to
// single spaces, trimmed. Bytes >= 0x80 pass through unchanged. Returns the
// empty string when nothing survives.
std::string normalize_query(std::string_view raw, std::string_view keep = "'");

std::vector<std::string> tokenize(std::string_view normalized);

std::string join(const std::vector<std::string>& tokens);

// True when `needle` occurs in `haystack` as a contiguous token run.
bool contains_tokens(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle);

}  // namespace aspector::text
