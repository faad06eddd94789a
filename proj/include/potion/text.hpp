#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace potion {

// ASCII-only classification; bytes >= 0x80 pass through untouched so UTF-8
// text is never split inside a code point.
constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
constexpr bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || is_upper(c) || (c >= '0' && c <= '9');
}
constexpr char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }
constexpr bool is_sentence_end(char c) { return c == '.' || c == '!' || c == ';'; }

// Collapses whitespace runs to one space and trims both ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

// Canonical form used for recipe identity comparisons: lowercase, single
// spaces, runs of sentence punctuation inside the text become one period and
// are dropped at the end.
inline std::string normalize_text(std::string_view s) {
  const std::string collapsed = collapse_whitespace(s);
  std::string out;
  out.reserve(collapsed.size());
  std::size_t i = 0;
  while (i < collapsed.size()) {
    const char c = collapsed[i];
    if (!is_sentence_end(c)) {
      out.push_back(to_lower(c));
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < collapsed.size() && is_sentence_end(collapsed[j])) ++j;
    if (j == collapsed.size()) break;  // trailing punctuation
    out.push_back('.');
    i = j;
  }
  while (!out.empty() && (out.back() == ' ' || is_sentence_end(out.back()))) out.pop_back();
  return out;
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace potion
