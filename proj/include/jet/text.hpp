#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace jet {

// Lowercases UTF-8 text and splits it into tokens. Any codepoint that is
// neither a letter, a digit, nor whitespace acts as a token boundary, so
// "New-York!" becomes ["new", "york"]. Digits are kept. The result may be
// empty. Classification of non-ASCII codepoints uses the C.UTF-8 locale
// tables; if no UTF-8 locale is available, non-ASCII codepoints are kept
// verbatim as letter-like.
std::vector<std::string> normalize(std::string_view raw);

// Joins tokens with a single space (the canonical surface of a normalized
// term).
std::string join_tokens(const std::vector<std::string>& tokens);

// Splits a line on TAB. Returned views point into `line`.
std::vector<std::string_view> split_tsv(std::string_view line);

// Splits on `sep`, skipping empty fields.
std::vector<std::string> split_list(std::string_view text, char sep);

// Embedding-key form of a term: tokens joined by '_', literal underscores
// inside a token escaped as "\_".
std::string term_key(const std::vector<std::string>& tokens);
std::vector<std::string> term_key_tokens(std::string_view key);

}  // namespace jet
