#pragma once

// Article records, the length filter that turns them into title-gen /
// abstract-gen pairs, corpus statistics, and deterministic splits.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "json.hpp"
#include "scisumm/error.hpp"
#include "scisumm/eval.hpp"
#include "scisumm/log.hpp"
#include "scisumm/stats.hpp"
#include "scisumm/textproc.hpp"

namespace scisumm {

struct ArticleRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::string body;  // empty for title-only records
};

enum class Task { title_gen, abstract_gen };

inline std::string_view to_string(Task t) {
  return t == Task::title_gen ? "title-gen" : "abstract-gen";
}

inline Task parse_task(std::string_view s) {
  if (s == "title-gen" || s == "title_gen") return Task::title_gen;
  if (s == "abstract-gen" || s == "abstract_gen") return Task::abstract_gen;
  throw UsageError("unknown task '" + std::string(s) + "' (expected title-gen or abstract-gen)");
}

struct PairExample {
  std::string id;
  TokenizedText source;
  TokenizedText target;
  Task task = Task::title_gen;
};

// ---------------------------------------------------------------------------
// Reading records

namespace detail {

inline std::optional<std::string> string_field(const nlohmann::json& j, const char* key,
                                               bool required, std::string& error) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) error = std::string("missing \"") + key + "\"";
    return std::nullopt;
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  error = std::string("\"") + key + "\" is not a string";
  return std::nullopt;
}

}  // namespace detail

/// Streams ArticleRecords from a line-delimited JSON file. Malformed lines
/// and duplicate ids are skipped with a warning naming the line.
class RecordReader {
 public:
  explicit RecordReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open record file: " + path);
  }

  std::optional<ArticleRecord> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::string error;
      auto rec = parse(line, error);
      if (!rec) {
        ++skipped_;
        log::warn(path_ + ":" + std::to_string(line_no_) + ": " + error + "; line skipped");
        continue;
      }
      if (!seen_.insert(rec->id).second) {
        ++skipped_;
        log::warn(path_ + ":" + std::to_string(line_no_) + ": duplicate id '" + rec->id +
                  "'; line skipped");
        continue;
      }
      return rec;
    }
    return std::nullopt;
  }

  std::size_t line_number() const { return line_no_; }
  std::size_t skipped() const { return skipped_; }

  static std::optional<ArticleRecord> parse(std::string_view line, std::string& error) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      error = "not a JSON object";
      return std::nullopt;
    }
    ArticleRecord r;
    auto id = detail::string_field(j, "id", true, error);
    auto title = detail::string_field(j, "title", true, error);
    auto abstract = detail::string_field(j, "abstract", true, error);
    auto body = detail::string_field(j, "body", false, error);
    if (!error.empty()) return std::nullopt;
    if (id->empty()) {
      error = "empty \"id\"";
      return std::nullopt;
    }
    r.id = std::move(*id);
    r.title = std::move(*title);
    r.abstract = std::move(*abstract);
    if (body) r.body = std::move(*body);
    return r;
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
  std::unordered_set<std::string> seen_;
};

inline std::vector<ArticleRecord> read_records(const std::string& path) {
  RecordReader reader(path);
  std::vector<ArticleRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

// ---------------------------------------------------------------------------
// Filtering

struct TokenizedRecord {
  std::string id;
  TokenizedText title;
  TokenizedText abstract;
  TokenizedText body;
};

inline TokenizedRecord prepare(const ArticleRecord& r) {
  return {r.id, split_sentences(normalize(r.title)), split_sentences(normalize(r.abstract)),
          split_sentences(normalize(r.body))};
}

/// Inclusive token-count ranges; counts include punctuation tokens.
struct LengthBounds {
  std::size_t abstract_min = 150, abstract_max = 370;
  std::size_t title_min = 6, title_max = 25;
  std::size_t body_min = 700, body_max = 10000;
};

enum class RejectReason {
  abstract_too_short,
  abstract_too_long,
  title_too_short,
  title_too_long,
  body_too_short,
  body_too_long,
};

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::abstract_too_short: return "abstract_too_short";
    case RejectReason::abstract_too_long: return "abstract_too_long";
    case RejectReason::title_too_short: return "title_too_short";
    case RejectReason::title_too_long: return "title_too_long";
    case RejectReason::body_too_short: return "body_too_short";
    case RejectReason::body_too_long: return "body_too_long";
  }
  return "unknown";
}

inline constexpr std::array<RejectReason, 6> kRejectReasons = {
    RejectReason::abstract_too_short, RejectReason::abstract_too_long,
    RejectReason::title_too_short,    RejectReason::title_too_long,
    RejectReason::body_too_short,     RejectReason::body_too_long};

using FilterResult = std::variant<PairExample, RejectReason>;

namespace detail {

// All title sentences merged into one.
inline TokenizedText single_sentence(const TokenizedText& t) {
  if (t.size() <= 1) return t;
  Sentence merged;
  merged.span = {t.sentences.front().span.begin, t.sentences.back().span.end};
  for (const auto& s : t.sentences) merged.tokens.insert(merged.tokens.end(), s.tokens.begin(), s.tokens.end());
  TokenizedText out;
  out.sentences.push_back(std::move(merged));
  return out;
}

}  // namespace detail

/// Checks abstract, then title, then (abstract-gen only) body; the first
/// violated bound is the rejection reason.
inline FilterResult filter_pair(const TokenizedRecord& r, Task task,
                                const LengthBounds& b = {}) {
  const std::size_t a = r.abstract.token_count();
  const std::size_t t = r.title.token_count();
  if (a < b.abstract_min) return RejectReason::abstract_too_short;
  if (a > b.abstract_max) return RejectReason::abstract_too_long;
  if (t < b.title_min) return RejectReason::title_too_short;
  if (t > b.title_max) return RejectReason::title_too_long;
  if (task == Task::abstract_gen) {
    const std::size_t n = r.body.token_count();
    if (n < b.body_min) return RejectReason::body_too_short;
    if (n > b.body_max) return RejectReason::body_too_long;
    return PairExample{r.id, r.body, r.abstract, task};
  }
  return PairExample{r.id, r.abstract, detail::single_sentence(r.title), task};
}

inline FilterResult filter_pair(const ArticleRecord& r, Task task, const LengthBounds& b = {}) {
  return filter_pair(prepare(r), task, b);
}

// ---------------------------------------------------------------------------
// Pair files

inline nlohmann::json to_json(const PairExample& p) {
  return {{"id", p.id},
          {"source", to_segmented(p.source)},
          {"target", to_segmented(p.target)},
          {"task", std::string(to_string(p.task))}};
}

inline PairExample pair_from_json(const nlohmann::json& j) {
  PairExample p;
  p.id = j.at("id").get<std::string>();
  p.source = parse_segmented(j.at("source").get<std::string>());
  p.target = parse_segmented(j.at("target").get<std::string>());
  p.task = parse_task(j.value("task", std::string("title-gen")));
  if (p.task == Task::title_gen) p.target = detail::single_sentence(p.target);
  return p;
}

/// Streams PairExamples from a line-delimited pair file.
class PairReader {
 public:
  explicit PairReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open pair file: " + path);
  }

  /// Raw JSON of the next non-blank line.
  std::optional<nlohmann::json> next_json() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw DataError(path_ + ":" + std::to_string(line_no_) + ": not a JSON object");
      return j;
    }
    return std::nullopt;
  }

  std::optional<PairExample> next() {
    auto j = next_json();
    if (!j) return std::nullopt;
    try {
      return pair_from_json(*j);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path_ + ":" + std::to_string(line_no_) + ": " + e.what());
    }
  }

  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

// ---------------------------------------------------------------------------
// Statistics

/// Mean and population standard deviation of the per-pair quantities.
/// Sentence token counts pool every sentence of the corpus.
struct CorpusStats {
  std::uint64_t examples = 0;
  RunningStats source_tokens, source_sentences, source_sentence_tokens;
  RunningStats target_tokens, target_sentences, target_sentence_tokens;
  RunningStats overlap;  // target against source
  RunningStats source_repeat, target_repeat;

  void add(const PairExample& p, const Stopwords& stopwords = default_stopwords()) {
    ++examples;
    source_tokens.add(static_cast<double>(p.source.token_count()));
    source_sentences.add(static_cast<double>(p.source.size()));
    for (const auto& s : p.source.sentences) source_sentence_tokens.add(static_cast<double>(s.size()));
    target_tokens.add(static_cast<double>(p.target.token_count()));
    target_sentences.add(static_cast<double>(p.target.size()));
    for (const auto& s : p.target.sentences) target_sentence_tokens.add(static_cast<double>(s.size()));
    overlap.add(scisumm::overlap(p.target, p.source, stopwords));
    if (!p.source.empty()) source_repeat.add(repeat(p.source, stopwords));
    if (!p.target.empty()) target_repeat.add(repeat(p.target, stopwords));
  }

  void merge(const CorpusStats& o) {
    examples += o.examples;
    source_tokens.merge(o.source_tokens);
    source_sentences.merge(o.source_sentences);
    source_sentence_tokens.merge(o.source_sentence_tokens);
    target_tokens.merge(o.target_tokens);
    target_sentences.merge(o.target_sentences);
    target_sentence_tokens.merge(o.target_sentence_tokens);
    overlap.merge(o.overlap);
    source_repeat.merge(o.source_repeat);
    target_repeat.merge(o.target_repeat);
  }

  /// (name, stats) in a fixed order.
  std::vector<std::pair<std::string_view, const RunningStats*>> fields() const {
    return {{"source_tokens", &source_tokens},
            {"source_sentences", &source_sentences},
            {"source_sentence_tokens", &source_sentence_tokens},
            {"target_tokens", &target_tokens},
            {"target_sentences", &target_sentences},
            {"target_sentence_tokens", &target_sentence_tokens},
            {"overlap", &overlap},
            {"source_repeat", &source_repeat},
            {"target_repeat", &target_repeat}};
  }
};

template <typename Range>
CorpusStats corpus_stats(const Range& pairs, const Stopwords& stopwords = default_stopwords()) {
  CorpusStats s;
  for (const PairExample& p : pairs) s.add(p, stopwords);
  if (s.examples == 0) throw DataError("corpus_stats: no examples");
  return s;
}

inline nlohmann::json to_json(const CorpusStats& s) {
  nlohmann::json j;
  j["examples"] = s.examples;
  for (const auto& [name, st] : s.fields())
    j[std::string(name)] = {{"mean", st->mean()}, {"std", st->stddev()}};
  return j;
}

/// "key.mean=value" / "key.std=value" lines.
inline std::string to_key_value(const CorpusStats& s) {
  std::string out = "examples=" + std::to_string(s.examples) + "\n";
  char buf[64];
  for (const auto& [name, st] : s.fields()) {
    std::snprintf(buf, sizeof buf, "%.6f", st->mean());
    out += std::string(name) + ".mean=" + buf + "\n";
    std::snprintf(buf, sizeof buf, "%.6f", st->stddev());
    out += std::string(name) + ".std=" + buf + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splits

enum class Split { train, valid, test };

inline std::string_view to_string(Split s) {
  return s == Split::train ? "train" : s == Split::valid ? "valid" : "test";
}

struct SplitFractions {
  double train = 0.8, valid = 0.1, test = 0.1;

  void validate() const {
    if (train < 0 || valid < 0 || test < 0 || std::abs(train + valid + test - 1.0) > 1e-9)
      throw UsageError("split fractions must be non-negative and sum to 1");
  }
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Split of one id: a seeded hash of the id mapped to [0, 1) and cut at the
/// cumulative fractions. Independent of record order.
inline Split assign_split(std::string_view id, std::uint64_t seed, const SplitFractions& f) {
  const std::uint64_t h = detail::splitmix64(detail::fnv1a(id) ^ detail::splitmix64(seed));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u < f.train) return Split::train;
  if (u < f.train + f.valid) return Split::valid;
  // A zero test fraction never receives records, even with rounding.
  return f.test > 0.0 ? Split::test : (f.valid > 0.0 ? Split::valid : Split::train);
}

struct DatasetSplit {
  std::vector<PairExample> train, valid, test;
};

inline DatasetSplit split_dataset(std::vector<PairExample> pairs, std::uint64_t seed,
                                  const SplitFractions& f) {
  f.validate();
  DatasetSplit out;
  for (auto& p : pairs) {
    switch (assign_split(p.id, seed, f)) {
      case Split::train: out.train.push_back(std::move(p)); break;
      case Split::valid: out.valid.push_back(std::move(p)); break;
      case Split::test: out.test.push_back(std::move(p)); break;
    }
  }
  return out;
}

}  // namespace scisumm
