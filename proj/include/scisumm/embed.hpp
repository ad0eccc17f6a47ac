#pragma once

// Word embeddings, corpus IDF weights, and TF-IDF weighted centroid
// embeddings of sentences and documents.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scisumm/error.hpp"
#include "scisumm/log.hpp"
#include "scisumm/textproc.hpp"

namespace scisumm {

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

inline std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) utf8::append(out, utf8::to_lower(utf8::decode(s, pos)));
  return out;
}

}  // namespace detail

/// Immutable-after-load map from token to a dense float vector.
class EmbeddingTable {
 public:
  using Id = std::size_t;

  explicit EmbeddingTable(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw DataError("embedding dimension must be positive");
  }

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return words_.size(); }

  /// Inserts or overwrites. Returns true if the token was already present.
  bool set(std::string token, std::span<const float> values) {
    if (values.size() != dim_)
      throw DataError("vector for '" + token + "' has " + std::to_string(values.size()) +
                      " components, expected " + std::to_string(dim_));
    for (float v : values)
      if (!std::isfinite(v)) throw DataError("non-finite component in vector for '" + token + "'");
    if (auto it = index_.find(token); it != index_.end()) {
      std::copy(values.begin(), values.end(), data_.begin() + it->second * dim_);
      return true;
    }
    index_.emplace(token, words_.size());
    words_.push_back(std::move(token));
    data_.insert(data_.end(), values.begin(), values.end());
    return false;
  }

  std::optional<Id> id(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const float> vector(Id id) const { return {data_.data() + id * dim_, dim_}; }

  std::optional<std::span<const float>> find(std::string_view token) const {
    if (auto i = id(token)) return vector(*i);
    return std::nullopt;
  }

  const std::string& word(Id id) const { return words_[id]; }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Id, detail::StringHash, std::equal_to<>> index_;
  std::vector<std::string> words_;
  std::vector<float> data_;
};

enum class EmbeddingFormat { w2v_binary, w2v_text };

namespace detail {

inline float float_from_le(const unsigned char* b) {
  const std::uint32_t bits = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                             (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
  return std::bit_cast<float>(bits);
}

inline void float_to_le(float f, char* out) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int k = 0; k < 4; ++k) out[k] = static_cast<char>((bits >> (8 * k)) & 0xFF);
}

inline void insert_lowercased(EmbeddingTable& table, const std::string& raw,
                              std::span<const float> values) {
  std::string token = lowercase(raw);
  if (table.set(token, values))
    log::warn("duplicate embedding for '" + token + "', keeping the last one");
}

inline EmbeddingTable load_w2v_binary(std::istream& in, const std::string& path) {
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": missing header");
  std::istringstream hs(header);
  long long count = -1, dim = -1;
  if (!(hs >> count >> dim) || count < 0 || dim <= 0)
    throw DataError(path + ": malformed header '" + header + "'");
  EmbeddingTable table(static_cast<std::size_t>(dim));
  std::vector<unsigned char> buf(static_cast<std::size_t>(dim) * 4);
  std::vector<float> values(static_cast<std::size_t>(dim));
  for (long long e = 0; e < count; ++e) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF && (ch == '\n' || ch == '\r' || ch == ' ')) {
    }
    while (ch != EOF && ch != ' ') {
      token.push_back(static_cast<char>(ch));
      ch = in.get();
    }
    const auto offset = static_cast<long long>(in.tellg());
    if (ch == EOF)
      throw DataError(path + ": truncated at entry " + std::to_string(e) + " of " +
                      std::to_string(count));
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw DataError(path + ": vector for '" + token + "' at byte offset " +
                      std::to_string(offset) + " is shorter than dimension " +
                      std::to_string(dim));
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = float_from_le(&buf[4 * k]);
    for (float v : values)
      if (!std::isfinite(v))
        throw DataError(path + ": non-finite value in vector for '" + token +
                        "' at byte offset " + std::to_string(offset));
    insert_lowercased(table, token, values);
  }
  return table;
}

inline EmbeddingTable load_w2v_text(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  long long declared = -1;
  long long entries = 0;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<std::string> fields;
    for (std::string f; ls >> f;) fields.push_back(std::move(f));
    if (line_no == 1 && fields.size() == 1) {
      // "count dim" header
      try {
        std::size_t used = 0;
        declared = std::stoll(token, &used);
        const long long dim = std::stoll(fields[0]);
        if (used == token.size() && dim > 0) {
          table.emplace(static_cast<std::size_t>(dim));
          continue;
        }
      } catch (const std::exception&) {
      }
      declared = -1;
    }
    if (!table) table.emplace(fields.size());
    if (fields.size() != table->dimension())
      throw DataError(path + ":" + std::to_string(line_no) + ": vector for '" + token + "' has " +
                      std::to_string(fields.size()) + " components, expected " +
                      std::to_string(table->dimension()));
    values.resize(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      char* end = nullptr;
      values[k] = std::strtof(fields[k].c_str(), &end);
      if (end == fields[k].c_str() || *end != '\0' || !std::isfinite(values[k]))
        throw DataError(path + ":" + std::to_string(line_no) + ": bad value '" + fields[k] +
                        "' in vector for '" + token + "'");
    }
    insert_lowercased(*table, token, values);
    ++entries;
  }
  if (!table) throw DataError(path + ": no embeddings found");
  if (declared >= 0 && declared != entries)
    throw DataError(path + ": header declares " + std::to_string(declared) + " entries, found " +
                    std::to_string(entries));
  return std::move(*table);
}

}  // namespace detail

/// Loads a word2vec model. Tokens are lowercased on load; on duplicates the
/// last vector wins and a warning is logged.
inline EmbeddingTable load_embeddings(const std::string& path, EmbeddingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);
  return format == EmbeddingFormat::w2v_binary ? detail::load_w2v_binary(in, path)
                                               : detail::load_w2v_text(in, path);
}

/// Picks the format from the extension: ".bin" is binary, anything else text.
inline EmbeddingFormat guess_embedding_format(std::string_view path) {
  return path.ends_with(".bin") ? EmbeddingFormat::w2v_binary : EmbeddingFormat::w2v_text;
}

inline void save_embeddings(const EmbeddingTable& table, const std::string& path,
                            EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file: " + path);
  out << table.size() << ' ' << table.dimension() << '\n';
  std::vector<char> buf(table.dimension() * 4);
  for (EmbeddingTable::Id i = 0; i < table.size(); ++i) {
    out << table.word(i);
    const auto v = table.vector(i);
    if (format == EmbeddingFormat::w2v_binary) {
      out << ' ';
      for (std::size_t k = 0; k < v.size(); ++k) detail::float_to_le(v[k], &buf[4 * k]);
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    } else {
      char num[32];
      for (float f : v) {
        std::snprintf(num, sizeof num, " %.9g", static_cast<double>(f));
        out << num;
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// IDF

/// Document frequencies over a corpus; idf(x) = ln((1+N)/(1+df(x))) + 1.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::uint64_t doc_count,
           std::unordered_map<std::string, std::uint64_t, detail::StringHash, std::equal_to<>> df)
      : n_(doc_count), df_(std::move(df)) {
    for (const auto& [token, f] : df_)
      if (f > n_)
        throw DataError("document frequency of '" + token + "' exceeds document count");
  }

  std::uint64_t doc_count() const { return n_; }

  std::uint64_t doc_freq(std::string_view token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
  }

  double idf(std::string_view token) const {
    const double n = static_cast<double>(n_);
    return std::log((1.0 + n) / (1.0 + static_cast<double>(doc_freq(token)))) + 1.0;
  }

  const auto& frequencies() const { return df_; }

 private:
  std::uint64_t n_ = 0;
  std::unordered_map<std::string, std::uint64_t, detail::StringHash, std::equal_to<>> df_;
};

/// Mergeable document-frequency accumulator.
class IdfBuilder {
 public:
  void add(const TokenizedText& doc) {
    std::unordered_map<std::string_view, bool> seen;
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens)
        if (seen.emplace(t.surface, true).second) {
          if (auto it = df_.find(t.surface); it != df_.end())
            ++it->second;
          else
            df_.emplace(t.surface, 1);
        }
    ++n_;
  }

  void merge(const IdfBuilder& other) {
    n_ += other.n_;
    for (const auto& [token, f] : other.df_) df_[token] += f;
  }

  std::uint64_t doc_count() const { return n_; }

  IdfTable build() const {
    if (n_ == 0) throw DataError("cannot build IDF table from an empty corpus");
    return IdfTable(n_, df_);
  }

 private:
  std::uint64_t n_ = 0;
  std::unordered_map<std::string, std::uint64_t, detail::StringHash, std::equal_to<>> df_;
};

template <typename Range>
IdfTable build_idf(const Range& corpus) {
  IdfBuilder b;
  for (const TokenizedText& doc : corpus) b.add(doc);
  return b.build();
}

/// First line N, then "token<TAB>df" sorted by token.
inline void save_idf(const IdfTable& idf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write IDF file: " + path);
  out << idf.doc_count() << '\n';
  std::map<std::string_view, std::uint64_t> sorted;
  for (const auto& [token, f] : idf.frequencies()) sorted.emplace(token, f);
  for (const auto& [token, f] : sorted) out << token << '\t' << f << '\n';
}

inline IdfTable load_idf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open IDF file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing document-count header");
  std::uint64_t n = 0;
  try {
    n = std::stoull(line);
  } catch (const std::exception&) {
    throw DataError(path + ": malformed document-count header '" + line + "'");
  }
  std::unordered_map<std::string, std::uint64_t, detail::StringHash, std::equal_to<>> df;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected token<TAB>df");
    try {
      df[line.substr(0, tab)] = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad document frequency");
    }
  }
  return IdfTable(n, std::move(df));
}

// ---------------------------------------------------------------------------
// Centroid embeddings

using TermFrequencies = std::unordered_map<std::string, std::uint32_t, detail::StringHash, std::equal_to<>>;

inline TermFrequencies term_frequencies(const TokenizedText& doc) {
  TermFrequencies tf;
  for (const auto& s : doc.sentences)
    for (const auto& t : s.tokens) {
      if (auto it = tf.find(t.surface); it != tf.end())
        ++it->second;
      else
        tf.emplace(t.surface, 1);
    }
  return tf;
}

struct SentenceEmbedding {
  std::vector<double> vector;
  double norm = 0.0;
  std::size_t content_token_count = 0;
};

/// (1/t_s) * sum over in-vocabulary content tokens x of weight(x) * E(x),
/// with t_s the sum of the same weights. Returns the zero vector when no
/// token qualifies.
template <typename TokenRange, typename WeightFn>
SentenceEmbedding weighted_centroid(const TokenRange& tokens, const EmbeddingTable& emb,
                                    const Stopwords& stopwords, WeightFn&& weight) {
  SentenceEmbedding out;
  out.vector.assign(emb.dimension(), 0.0);
  double total = 0.0;
  for (const Token& t : tokens) {
    if (!is_content(t, stopwords)) continue;
    const auto v = emb.find(t.surface);
    if (!v) continue;
    const double w = weight(t.surface);
    for (std::size_t k = 0; k < v->size(); ++k) out.vector[k] += w * (*v)[k];
    total += w;
    ++out.content_token_count;
  }
  if (out.content_token_count == 0 || total <= 0.0) {
    std::fill(out.vector.begin(), out.vector.end(), 0.0);
    out.content_token_count = 0;
    return out;
  }
  double sq = 0.0;
  for (auto& x : out.vector) {
    x /= total;
    sq += x * x;
  }
  out.norm = std::sqrt(sq);
  return out;
}

namespace detail {

inline auto tfidf_weight(const IdfTable& idf, const TermFrequencies& tf) {
  return [&idf, &tf](std::string_view token) {
    auto it = tf.find(token);
    const double count = it == tf.end() ? 1.0 : static_cast<double>(it->second);
    return count * idf.idf(token);
  };
}

// Sentences of a document viewed as one token sequence.
struct DocumentTokens {
  const TokenizedText& doc;

  struct Iterator {
    const TokenizedText* doc;
    std::size_t s, t;
    const Token& operator*() const { return doc->sentences[s].tokens[t]; }
    Iterator& operator++() {
      if (++t >= doc->sentences[s].tokens.size()) {
        t = 0;
        ++s;
        while (s < doc->sentences.size() && doc->sentences[s].tokens.empty()) ++s;
      }
      return *this;
    }
    bool operator!=(const Iterator& o) const { return s != o.s || t != o.t; }
  };

  Iterator begin() const {
    std::size_t s = 0;
    while (s < doc.sentences.size() && doc.sentences[s].tokens.empty()) ++s;
    return {&doc, s, 0};
  }
  Iterator end() const { return {&doc, doc.sentences.size(), 0}; }
};

}  // namespace detail

/// Sentence embedding with t(x) = tf(x) * idf(x); tf is document-level.
inline SentenceEmbedding sentence_embedding(const Sentence& s, const EmbeddingTable& emb,
                                            const IdfTable& idf, const TermFrequencies& tf,
                                            const Stopwords& stopwords = default_stopwords()) {
  return weighted_centroid(s.tokens, emb, stopwords, detail::tfidf_weight(idf, tf));
}

/// Centroid of the whole document, weighted like sentence_embedding().
inline SentenceEmbedding document_embedding(const TokenizedText& d, const EmbeddingTable& emb,
                                            const IdfTable& idf,
                                            const Stopwords& stopwords = default_stopwords()) {
  const auto tf = term_frequencies(d);
  return weighted_centroid(detail::DocumentTokens{d}, emb, stopwords,
                           detail::tfidf_weight(idf, tf));
}

/// Cosine similarity; 0 when either vector has zero norm.
inline double cosine(const SentenceEmbedding& a, const SentenceEmbedding& b) {
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t k = 0; k < a.vector.size(); ++k) dot += a.vector[k] * b.vector[k];
  return dot / (a.norm * b.norm);
}

}  // namespace scisumm
