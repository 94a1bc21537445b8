#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pivotmt {

// Lowercases ASCII letters, splits on whitespace, then peels the marks
// . , ; : ! ? " ( ) off both ends of each word as separate tokens.
// Non-ASCII bytes pass through unchanged. Throws ContractError on
// empty or whitespace-only text.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> split_whitespace(std::string_view text);

// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace pivotmt
