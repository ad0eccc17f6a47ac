#pragma once

// Text normalization, tokenization and sentence splitting.
//
// normalize() lowercases, strips URLs, masks numbers with "#" and collapses
// whitespace. split_sentences() tokenizes normalized text (punctuation is
// detached, hyphenated words stay whole) and groups tokens into sentences.
// Everything here is pure; all functions are safe to call concurrently.

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scisumm/error.hpp"
#include "scisumm/utf8.hpp"

namespace scisumm {

enum class TokenKind { word, number_mask, punctuation };

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::word;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Byte offsets [begin, end) into the text a sentence was split from.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  CharSpan span;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TokenizedText {
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  friend bool operator==(const TokenizedText&, const TokenizedText&) = default;
};

// ---------------------------------------------------------------------------
// Stopwords

class Stopwords {
 public:
  Stopwords() = default;
  template <typename Range>
  explicit Stopwords(const Range& words) {
    for (const auto& w : words) words_.emplace(w);
  }

  bool contains(std::string_view w) const { return words_.find(w) != words_.end(); }
  std::size_t size() const { return words_.size(); }
  void insert(std::string w) { words_.insert(std::move(w)); }

 private:
  std::set<std::string, std::less<>> words_;
};

namespace detail {

// NLTK's English list.
inline constexpr std::array<std::string_view, 179> kEnglishStopwords = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
    "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
    "yourselves", "he", "him", "his", "himself", "she", "she's", "her",
    "hers", "herself", "it", "it's", "its", "itself", "they", "them", "their",
    "theirs", "themselves", "what", "which", "who", "whom", "this", "that",
    "that'll", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did",
    "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as",
    "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above",
    "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
    "under", "again", "further", "then", "once", "here", "there", "when",
    "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own",
    "same", "so", "than", "too", "very", "s", "t", "can", "will", "just",
    "don", "don't", "should", "should've", "now", "d", "ll", "m", "o", "re",
    "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't",
    "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn",
    "mustn't", "needn", "needn't", "shan", "shan't", "shouldn", "shouldn't",
    "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't"};

inline constexpr std::array<std::string_view, 40> kAbbreviations = {
    "fig.",  "figs.", "al.",  "e.g.", "i.e.",  "vs.",    "cf.",  "approx.",
    "eq.",   "eqs.",  "ref.", "refs.", "no.",  "nos.",   "dr.",  "mr.",
    "mrs.",  "ms.",   "prof.", "st.",  "ca.",  "resp.",  "vol.", "pp.",
    "sp.",   "spp.",  "inc.", "ltd.", "co.",   "jr.",    "sr.",  "viz.",
    "tab.",  "sec.",  "ch.",  "dept.", "univ.", "suppl.", "min.", "max."};

inline bool is_abbreviation(std::string_view w) {
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) !=
         kAbbreviations.end();
}

}  // namespace detail

inline const Stopwords& default_stopwords() {
  static const Stopwords words(detail::kEnglishStopwords);
  return words;
}

/// One token per line; blank lines and lines starting with '#' are ignored.
inline Stopwords load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  Stopwords words;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string w;
    for (char32_t cp : utf8::decode_all(std::string_view(line).substr(b, e - b + 1)))
      utf8::append(w, utf8::to_lower(cp));
    words.insert(std::move(w));
  }
  return words;
}

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

inline bool starts_with_at(std::u32string_view s, std::size_t i, std::u32string_view p) {
  return s.size() >= i + p.size() && s.compare(i, p.size(), p) == 0;
}

inline bool is_scheme_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || utf8::is_digit(c) || c == U'+' || c == U'.' ||
         c == U'-';
}

inline std::u32string strip_urls(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  // A URL runs to the next space, minus trailing sentence punctuation.
  auto run_end = [&](std::size_t from) {
    const std::size_t start = from;
    while (from < s.size() && !utf8::is_space(s[from])) ++from;
    while (from > start && std::u32string_view(U".,;:!?)]}'\"").find(s[from - 1]) != std::u32string_view::npos)
      --from;
    return from;
  };
  while (i < s.size()) {
    if (starts_with_at(s, i, U"://")) {
      // Walk back over the scheme already copied to `out`.
      std::size_t back = out.size();
      while (back > 0 && is_scheme_char(out[back - 1])) --back;
      while (back < out.size() && !(out[back] >= U'a' && out[back] <= U'z')) ++back;
      if (back < out.size()) {
        out.resize(back);
        i = run_end(i);
        continue;
      }
    } else if (starts_with_at(s, i, U"www.") && (i == 0 || !utf8::is_word(s[i - 1]))) {
      i = run_end(i);
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::u32string mask_numbers(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const std::size_t n = s.size();
  std::size_t i = 0;
  auto word_at = [&](std::size_t k) { return k < n && utf8::is_word(s[k]); };
  while (i < n) {
    const char32_t c = s[i];
    const bool sign = (c == U'+' || c == U'-' || c == 0x2212) && i + 1 < n &&
                      utf8::is_digit(s[i + 1]) && (i == 0 || !utf8::is_word(s[i - 1]));
    const bool starts = utf8::is_digit(c) && (i == 0 || !utf8::is_word(s[i - 1]));
    if (!sign && !starts) {
      if (utf8::is_digit(c)) {
        // Digit glued to a preceding word character: copy the whole word run.
        while (i < n && utf8::is_word(s[i])) out.push_back(s[i++]);
      } else {
        out.push_back(c);
        ++i;
      }
      continue;
    }
    std::size_t j = sign ? i + 1 : i;
    while (j < n && utf8::is_digit(s[j])) ++j;
    while (j + 1 < n && (s[j] == U'.' || s[j] == U',') && utf8::is_digit(s[j + 1])) {
      ++j;
      while (j < n && utf8::is_digit(s[j])) ++j;
    }
    if (word_at(j)) {
      // Alphanumeric token such as "14a"; leave it and its word run alone.
      while (i < j) out.push_back(s[i++]);
      while (i < n && utf8::is_word(s[i])) out.push_back(s[i++]);
      continue;
    }
    out.push_back(U'#');
    i = j;
  }
  return out;
}

inline std::u32string collapse_whitespace(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending = false;
  for (char32_t c : s) {
    if (utf8::is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Lowercases, deletes URLs, replaces standalone numbers (optionally signed,
/// with decimal points or thousands separators) by "#", and collapses
/// whitespace runs to single spaces with no leading or trailing space.
/// Alphanumeric tokens such as "cd14" are kept.
inline std::string normalize(std::string_view raw) {
  std::u32string s = utf8::decode_all(raw);
  for (auto& c : s) c = utf8::to_lower(c);
  s = detail::strip_urls(s);
  s = detail::mask_numbers(s);
  s = detail::collapse_whitespace(s);
  return utf8::encode_all(s);
}

// ---------------------------------------------------------------------------
// Tokenization

inline TokenKind classify(std::string_view surface) {
  if (surface == "#") return TokenKind::number_mask;
  std::size_t pos = 0;
  while (pos < surface.size()) {
    const char32_t c = utf8::decode(surface, pos);
    if (c == U'#' || utf8::is_word(c)) return TokenKind::word;
  }
  return TokenKind::punctuation;
}

inline Token make_token(std::string surface) {
  const TokenKind kind = classify(surface);
  return Token{std::move(surface), kind};
}

namespace detail {

// Always split off, wherever they occur.
inline bool is_split_char(char32_t c) {
  switch (c) {
    case U'(': case U')': case U'[': case U']': case U'{': case U'}':
    case U'<': case U'>': case U'"': case U';': case U'!': case U'?':
    case U'%': case U'`': case 0x201C: case 0x201D: case 0x201E:
    case 0xAB: case 0xBB: case 0x2026:
      return true;
    default:
      return false;
  }
}

// Split off only at the start or end of a whitespace-delimited chunk.
inline bool is_edge_char(char32_t c) {
  return c == U'.' || c == U',' || c == U':' || c == U'\'' || c == 0x2018 ||
         c == 0x2019;
}

struct RawToken {
  std::size_t begin;
  std::size_t end;
};

// Peels edge punctuation off [b, e) of `text`, appending the pieces in order.
inline void peel(std::string_view text, std::size_t b, std::size_t e,
                 std::vector<RawToken>& out) {
  std::vector<RawToken> tail;
  while (b < e) {
    std::size_t p = b;
    const char32_t c = utf8::decode(text, p);
    if (!is_edge_char(c) || p == e) break;
    out.push_back({b, p});
    b = p;
  }
  while (b < e) {
    if (is_abbreviation(text.substr(b, e - b))) break;
    // Find the start of the last code point.
    std::size_t q = e - 1;
    while (q > b && (static_cast<unsigned char>(text[q]) & 0xC0) == 0x80) --q;
    std::size_t p = q;
    const char32_t c = utf8::decode(text, p);
    if (!is_edge_char(c) || q == b) break;
    tail.push_back({q, e});
    e = q;
  }
  if (b < e) out.push_back({b, e});
  out.insert(out.end(), tail.rbegin(), tail.rend());
}

inline std::vector<RawToken> raw_tokens(std::string_view text) {
  std::vector<RawToken> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t p = pos;
    if (utf8::is_space(utf8::decode(text, p))) {
      pos = p;
      continue;
    }
    // One whitespace-delimited chunk.
    std::size_t chunk_end = pos;
    while (chunk_end < text.size()) {
      std::size_t q = chunk_end;
      if (utf8::is_space(utf8::decode(text, q))) break;
      chunk_end = q;
    }
    std::size_t piece = pos;
    std::size_t cur = pos;
    while (cur < chunk_end) {
      std::size_t next = cur;
      const char32_t c = utf8::decode(text, next);
      if (is_split_char(c)) {
        if (piece < cur) peel(text, piece, cur, out);
        out.push_back({cur, next});
        piece = next;
      }
      cur = next;
    }
    if (piece < chunk_end) peel(text, piece, chunk_end, out);
    pos = chunk_end;
  }
  return out;
}

inline bool is_terminator(std::string_view t) { return t == "." || t == "!" || t == "?"; }

inline bool is_closer(std::string_view t) {
  return t == ")" || t == "]" || t == "\"" || t == "'" || t == "\xE2\x80\x9D" ||
         t == "\xE2\x80\x99" || t == "\xC2\xBB";
}

}  // namespace detail

/// Tokens of `text` in order: whitespace-separated, with brackets, quotes
/// and sentence punctuation detached. Hyphens never split a token.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  for (const auto& r : detail::raw_tokens(text))
    out.push_back(make_token(std::string(text.substr(r.begin, r.end - r.begin))));
  return out;
}

/// Splits normalized text into sentences. A sentence ends at ".", "!" or
/// "?" (plus any directly attached closing brackets or quotes) followed by
/// whitespace or end of text. Known abbreviations such as "fig." or
/// "e.g." are single tokens and never end a sentence.
inline TokenizedText split_sentences(std::string_view text) {
  TokenizedText result;
  const auto raw = detail::raw_tokens(text);
  Sentence current;
  auto flush = [&](std::size_t last) {
    current.span = CharSpan{current.span.begin, raw[last].end};
    result.sentences.push_back(std::move(current));
    current = Sentence{};
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string_view surface = text.substr(raw[i].begin, raw[i].end - raw[i].begin);
    if (current.tokens.empty()) current.span.begin = raw[i].begin;
    current.tokens.push_back(make_token(std::string(surface)));
    if (!detail::is_terminator(surface)) continue;
    // Absorb attached closers and terminators ("?!", ".)").
    std::size_t j = i;
    while (j + 1 < raw.size() && raw[j + 1].begin == raw[j].end) {
      const auto next = text.substr(raw[j + 1].begin, raw[j + 1].end - raw[j + 1].begin);
      if (!detail::is_closer(next) && !detail::is_terminator(next)) break;
      ++j;
      current.tokens.push_back(make_token(std::string(next)));
    }
    const bool boundary = j + 1 == raw.size() || raw[j + 1].begin > raw[j].end;
    i = j;
    if (boundary) flush(j);
  }
  if (!current.tokens.empty()) flush(raw.size() - 1);
  return result;
}

/// Tokens of one sentence joined by single spaces.
inline std::string join(const Sentence& s) {
  std::string out;
  for (const auto& t : s.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

/// One sentence per line, tokens space-separated. This is the on-disk form
/// of tokenized text in pair and summary files.
inline std::string to_segmented(const TokenizedText& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i) out.push_back('\n');
    out += join(text.sentences[i]);
  }
  return out;
}

/// Inverse of to_segmented(). Each line is additionally passed through the
/// sentence splitter, so plain tokenized output with several sentences on
/// one line is also split. Spans are offsets into `segmented`.
inline TokenizedText parse_segmented(std::string_view segmented) {
  TokenizedText out;
  std::size_t line_begin = 0;
  while (line_begin <= segmented.size()) {
    std::size_t line_end = segmented.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = segmented.size();
    auto part = split_sentences(segmented.substr(line_begin, line_end - line_begin));
    for (auto& s : part.sentences) {
      s.span.begin += line_begin;
      s.span.end += line_begin;
      out.sentences.push_back(std::move(s));
    }
    line_begin = line_end + 1;
  }
  return out;
}

/// Removes subword segmentation markers ("@@ ") so that byte-pair output is
/// scored at word level.
inline std::string desegment(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 3, "@@ ") == 0) {
      i += 3;
    } else if (text.compare(i, 2, "@@") == 0 && (i + 2 == text.size() || text[i + 2] == '\n')) {
      i += 2;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

inline bool is_content(const Token& token, const Stopwords& stopwords) {
  return token.kind == TokenKind::word && !stopwords.contains(token.surface);
}

/// All token surfaces of `text` in reading order.
inline std::vector<std::string_view> flatten(const TokenizedText& text,
                                             bool include_punctuation = true) {
  std::vector<std::string_view> out;
  out.reserve(text.token_count());
  for (const auto& s : text.sentences)
    for (const auto& t : s.tokens)
      if (include_punctuation || t.kind != TokenKind::punctuation) out.push_back(t.surface);
  return out;
}

}  // namespace scisumm
