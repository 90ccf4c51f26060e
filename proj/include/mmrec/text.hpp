#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mmrec {

// Tokens are runs of ASCII letters/digits or non-ASCII bytes (so UTF-8
// letters stay inside a token). ASCII is lowercased; tokens shorter than two
// code points are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Same as tokenize() but drops entries of the bundled English stop list.
std::vector<std::string> tokenize(std::string_view text, bool remove_stopwords);

bool is_stopword(std::string_view token);

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view text);

}  // namespace mmrec
