#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace glosskit {

// Whitespace tokenizer for pre-tokenized one-sentence-per-line files.
inline std::vector<std::string> tokenize_ws(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r'))
      ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r')
      ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string join_ws(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace glosskit
