//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Word tokenizer shared by every text-handling module.
//
// Tokens are lowercased runs of word characters. Whitespace and punctuation
// separate tokens and are dropped, with two exceptions: an apostrophe between
// two word characters stays inside the token ("what's"), and short
// emoticons such as ":d", ":)" or ";-p" are emitted as tokens of their own.
// Each token remembers the byte range it came from so callers can splice
// replacements into the original text.

#ifndef FAIRDIAL_TOKENIZE_HPP_
#define FAIRDIAL_TOKENIZE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairdial {

struct TokenSpan {
  std::string text;   // lowercased
  std::size_t begin;  // byte offset into the source text
  std::size_t end;    // one past the last byte

  bool operator==(const TokenSpan&) const = default;
};

namespace detail {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed
};

// Lenient UTF-8 decode: an invalid lead or truncated sequence yields
// U+FFFD over one byte.
inline CodePoint decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

inline bool is_space(char32_t c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline bool is_apostrophe(char32_t c) {
  return c == '\'' || c == 0x2019 || c == 0x02BC;
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  if (c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 ||
      c == 0xBB || c == 0xBF) {
    return true;
  }
  if (c >= 0x2010 && c <= 0x2027) return true;
  if (c >= 0x2030 && c <= 0x205E) return true;
  return c >= 0x3001 && c <= 0x3003;
}

inline bool is_word(char32_t c) {
  return !is_space(c) && !is_punct(c) && !is_apostrophe(c);
}

// Appends the lowercase form of one code point given as its UTF-8 bytes.
// ASCII and Latin-1 capitals are folded; everything else is copied.
inline void append_lower(std::string& out, std::string_view bytes,
                         char32_t cp) {
  if (cp < 0x80) {
    char ch = static_cast<char>(cp);
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    out.push_back(ch);
  } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
    const char32_t lower = cp + 0x20;
    out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
    out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
  } else {
    out.append(bytes);
  }
}

// Length in bytes of an emoticon starting at i, or 0. Recognised shapes are
// [:;=] optionally followed by '-', then one mouth character. Letter mouths
// must not run on into a word (":done" is not an emoticon).
inline std::size_t emoticon_length(std::string_view s, std::size_t i) {
  const char eyes = s[i];
  if (eyes != ':' && eyes != ';' && eyes != '=') return 0;
  std::size_t j = i + 1;
  if (j < s.size() && s[j] == '-') ++j;
  if (j >= s.size()) return 0;
  static constexpr std::string_view kMouths = "dDpPoOxX()[]/\\|*3";
  if (kMouths.find(s[j]) == std::string_view::npos) return 0;
  const std::size_t end = j + 1;
  if (end < s.size() && is_word(decode_utf8(s, end).value)) return 0;
  return end - i;
}

}  // namespace detail

inline std::vector<TokenSpan> tokenize_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  std::string current;
  std::size_t begin = 0;
  std::size_t last_end = 0;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back({std::move(current), begin, last_end});
      current.clear();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto cp = detail::decode_utf8(text, i);
    if (detail::is_word(cp.value)) {
      if (current.empty()) begin = i;
      detail::append_lower(current, text.substr(i, cp.length), cp.value);
      i += cp.length;
      last_end = i;
      continue;
    }
    if (detail::is_apostrophe(cp.value) && !current.empty() &&
        i + cp.length < text.size() &&
        detail::is_word(detail::decode_utf8(text, i + cp.length).value)) {
      current.push_back('\'');
      i += cp.length;
      last_end = i;
      continue;
    }
    flush();
    if (const std::size_t emo = detail::emoticon_length(text, i); emo > 0) {
      std::string face;
      for (std::size_t k = i; k < i + emo; ++k) {
        detail::append_lower(face, text.substr(k, 1),
                             static_cast<unsigned char>(text[k]));
      }
      out.push_back({std::move(face), i, i + emo});
      i += emo;
      continue;
    }
    i += cp.length;
  }
  flush();
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& span : tokenize_spans(text)) out.push_back(std::move(span.text));
  return out;
}

inline std::string join_tokens(std::span<const std::string> tokens,
                               std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

// Collapses every run of whitespace into one ASCII space and trims both ends.
inline std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto cp = detail::decode_utf8(text, i);
    if (detail::is_space(cp.value)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(i, cp.length));
    }
    i += cp.length;
  }
  return out;
}

}  // namespace fairdial

#endif  // FAIRDIAL_TOKENIZE_HPP_
