#include "pivotmt/text.hpp"

#include <charconv>

#include "pivotmt/error.hpp"

namespace pivotmt {
namespace {

bool is_mark(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case '"': case '(': case ')':
      return true;
    default:
      return false;
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (std::string word : split_whitespace(text)) {
    for (char& c : word) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    std::size_t b = 0, e = word.size();
    while (b < e && is_mark(word[b])) out.emplace_back(1, word[b++]);
    std::size_t trail = e;
    while (trail > b && is_mark(word[trail - 1])) --trail;
    if (trail > b) out.push_back(word.substr(b, trail - b));
    for (std::size_t k = trail; k < e; ++k) out.emplace_back(1, word[k]);
  }
  if (out.empty()) throw ContractError("tokenize: empty sentence");
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ContractError("format_number: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace pivotmt
