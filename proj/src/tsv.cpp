#include "aspector/tsv.hpp"

#include <fstream>

namespace aspector::tsv {

std::vector<std::string> read_lines(const std::string& path, bool skip_comments) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_comments && (line.empty() || line[0] == '#')) continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    std::size_t j = line.find('\t', i);
    if (j == std::string::npos) {
      fields.push_back(line.substr(i));
      break;
    }
    fields.push_back(line.substr(i, j - i));
    i = j + 1;
  }
  return fields;
}

}  // namespace aspector::tsv
