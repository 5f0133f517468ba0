#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aspector {

// Raised on malformed or missing input data. The CLI maps it to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tsv {

// Reads a UTF-8 text file into lines. Drops a trailing '\r' per line.
// Lines starting with '#' and blank lines are skipped when skip_comments.
// Throws DataError when the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path, bool skip_comments = true);

std::vector<std::string> split_tab(const std::string& line);

}  // namespace tsv
}  // namespace aspector
