#pragma once

// Summary scoring: ROUGE-1/2/L, Overlap, Repeat, and corpus aggregation.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "scisumm/error.hpp"
#include "scisumm/log.hpp"
#include "scisumm/stats.hpp"
#include "scisumm/textproc.hpp"

namespace scisumm {

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  static RougeScore from(double recall, double precision) {
    RougeScore s{recall, precision, 0.0};
    if (recall + precision > 0.0) s.f1 = 2.0 * recall * precision / (recall + precision);
    return s;
  }
};

struct RougeOptions {
  bool include_punctuation = true;
};

namespace detail {

inline std::unordered_map<std::string, std::size_t> ngram_counts(
    std::span<const std::string_view> tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  std::string key;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

/// ROUGE-N over token sequences with clipped (multiset) n-gram matches.
inline RougeScore rouge_n(std::span<const std::string_view> candidate,
                          std::span<const std::string_view> reference, std::size_t n) {
  if (n == 0) throw UsageError("rouge_n: n must be positive");
  if (reference.empty()) throw DataError("rouge_n: empty reference");
  if (candidate.empty()) return {};
  const auto ref = detail::ngram_counts(reference, n);
  const auto cand = detail::ngram_counts(candidate, n);
  std::size_t matches = 0;
  for (const auto& [gram, c] : cand)
    if (auto it = ref.find(gram); it != ref.end()) matches += std::min(c, it->second);
  const std::size_t ref_total = reference.size() >= n ? reference.size() - n + 1 : 0;
  const std::size_t cand_total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  const double recall = ref_total ? static_cast<double>(matches) / static_cast<double>(ref_total) : 0.0;
  const double precision =
      cand_total ? static_cast<double>(matches) / static_cast<double>(cand_total) : 0.0;
  return RougeScore::from(recall, precision);
}

inline RougeScore rouge_n(const TokenizedText& candidate, const TokenizedText& reference,
                          std::size_t n, const RougeOptions& opt = {}) {
  const auto c = flatten(candidate, opt.include_punctuation);
  const auto r = flatten(reference, opt.include_punctuation);
  return rouge_n(c, r, n);
}

/// Length of the longest common subsequence (two-row dynamic program).
inline std::size_t lcs_length(std::span<const std::string_view> a,
                              std::span<const std::string_view> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// ROUGE-L over the sentence-concatenated token sequences.
inline RougeScore rouge_l(std::span<const std::string_view> candidate,
                          std::span<const std::string_view> reference) {
  if (reference.empty()) throw DataError("rouge_l: empty reference");
  if (candidate.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return RougeScore::from(lcs / static_cast<double>(reference.size()),
                          lcs / static_cast<double>(candidate.size()));
}

inline RougeScore rouge_l(const TokenizedText& candidate, const TokenizedText& reference,
                          const RougeOptions& opt = {}) {
  const auto c = flatten(candidate, opt.include_punctuation);
  const auto r = flatten(reference, opt.include_punctuation);
  return rouge_l(c, r);
}

// ---------------------------------------------------------------------------
// Overlap and Repeat

namespace detail {

template <typename TokenRange>
std::unordered_set<std::string_view> content_set(const TokenRange& tokens,
                                                 const Stopwords& stopwords) {
  std::unordered_set<std::string_view> out;
  for (const Token& t : tokens)
    if (is_content(t, stopwords)) out.insert(t.surface);
  return out;
}

inline std::vector<Token> all_tokens(const TokenizedText& text) {
  std::vector<Token> out;
  for (const auto& s : text.sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

}  // namespace detail

/// Fraction of the candidate's unique content tokens that occur in the
/// source; nullopt when the candidate has no content token.
template <typename CandRange, typename SourceRange>
std::optional<double> overlap_fraction(const CandRange& candidate, const SourceRange& source,
                                       const Stopwords& stopwords = default_stopwords()) {
  const auto cand = detail::content_set(candidate, stopwords);
  if (cand.empty()) return std::nullopt;
  const auto src = detail::content_set(source, stopwords);
  std::size_t hit = 0;
  for (auto t : cand) hit += src.count(t);
  return static_cast<double>(hit) / static_cast<double>(cand.size());
}

/// overlap_fraction() with the degenerate case mapped to 0 and a warning.
template <typename CandRange, typename SourceRange>
double overlap(const CandRange& candidate, const SourceRange& source,
               const Stopwords& stopwords = default_stopwords()) {
  if (auto o = overlap_fraction(candidate, source, stopwords)) return *o;
  log::warn("overlap: candidate has no content tokens, scoring 0");
  return 0.0;
}

inline double overlap(const TokenizedText& candidate, const TokenizedText& source,
                      const Stopwords& stopwords = default_stopwords()) {
  return overlap(detail::all_tokens(candidate), detail::all_tokens(source), stopwords);
}

/// Mean over sentences of the overlap between a sentence and the rest of
/// the text. Sentences without content tokens contribute 0.
inline double repeat(const TokenizedText& text, const Stopwords& stopwords = default_stopwords()) {
  if (text.empty()) throw DataError("repeat: empty text");
  // Number of sentences containing each content token.
  std::unordered_map<std::string_view, std::size_t> sentence_freq;
  std::vector<std::unordered_set<std::string_view>> sets;
  sets.reserve(text.size());
  for (const auto& s : text.sentences) {
    sets.push_back(detail::content_set(s.tokens, stopwords));
    for (auto t : sets.back()) ++sentence_freq[t];
  }
  double total = 0.0;
  for (const auto& set : sets) {
    if (set.empty()) continue;
    std::size_t hit = 0;
    for (auto t : set) hit += sentence_freq[t] >= 2;
    total += static_cast<double>(hit) / static_cast<double>(set.size());
  }
  return total / static_cast<double>(text.size());
}

// ---------------------------------------------------------------------------
// Pair scoring and aggregation

struct PairScore {
  RougeScore r1, r2, rl;
  double overlap = 0.0;
  double repeat = 0.0;
  std::size_t tokens = 0;
};

struct ScoreOptions {
  RougeOptions rouge;
};

inline PairScore score_pair(const TokenizedText& candidate, const TokenizedText& reference,
                            const TokenizedText& source, const ScoreOptions& opt = {},
                            const Stopwords& stopwords = default_stopwords()) {
  PairScore s;
  const auto c = flatten(candidate, opt.rouge.include_punctuation);
  const auto r = flatten(reference, opt.rouge.include_punctuation);
  s.r1 = rouge_n(c, r, 1);
  s.r2 = rouge_n(c, r, 2);
  s.rl = rouge_l(c, r);
  s.overlap = overlap(candidate, source, stopwords);
  s.repeat = candidate.empty() ? 0.0 : repeat(candidate, stopwords);
  s.tokens = candidate.token_count();
  return s;
}

/// Column names in report order.
inline constexpr std::array<std::string_view, 12> kScoreColumns = {
    "r1_recall", "r1_precision", "r1_f1", "r2_recall", "r2_precision", "r2_f1",
    "rl_recall", "rl_precision", "rl_f1", "overlap",   "repeat",       "tokens"};

inline std::array<double, 12> columns(const PairScore& s) {
  return {s.r1.recall, s.r1.precision, s.r1.f1, s.r2.recall, s.r2.precision, s.r2.f1,
          s.rl.recall, s.rl.precision, s.rl.f1, s.overlap,   s.repeat,       static_cast<double>(s.tokens)};
}

struct ScoreReport {
  std::uint64_t pairs = 0;
  std::array<RunningStats, 12> stats;

  void add(const PairScore& s) {
    const auto cols = columns(s);
    for (std::size_t k = 0; k < cols.size(); ++k) stats[k].add(cols[k]);
    ++pairs;
  }
  void merge(const ScoreReport& o) {
    for (std::size_t k = 0; k < stats.size(); ++k) stats[k].merge(o.stats[k]);
    pairs += o.pairs;
  }
  const RunningStats& column(std::string_view name) const {
    for (std::size_t k = 0; k < kScoreColumns.size(); ++k)
      if (kScoreColumns[k] == name) return stats[k];
    throw UsageError("unknown score column: " + std::string(name));
  }
};

struct ScoredText {
  std::string id;
  TokenizedText text;
};

namespace detail {

inline std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

}  // namespace detail

/// Scores every system output against the reference and source with the
/// same id. Any id missing on one side is an error.
inline std::pair<std::vector<std::pair<std::string, PairScore>>, ScoreReport> score_pairs(
    const std::vector<ScoredText>& outputs, const std::vector<ScoredText>& references,
    const std::vector<ScoredText>& sources, const ScoreOptions& opt = {},
    const Stopwords& stopwords = default_stopwords()) {
  std::unordered_map<std::string_view, const TokenizedText*> refs, srcs;
  for (const auto& r : references) refs.emplace(r.id, &r.text);
  for (const auto& s : sources) srcs.emplace(s.id, &s.text);
  std::vector<std::string> missing;
  std::set<std::string_view> out_ids;
  for (const auto& o : outputs) {
    out_ids.insert(o.id);
    if (!refs.count(o.id)) missing.push_back(o.id + " (no reference)");
    if (!srcs.count(o.id)) missing.push_back(o.id + " (no source)");
  }
  for (const auto& r : references)
    if (!out_ids.count(r.id)) missing.push_back(r.id + " (no system output)");
  if (!missing.empty()) throw DataError("id mismatch: " + detail::list_ids(missing));
  std::vector<std::pair<std::string, PairScore>> per_pair;
  ScoreReport report;
  for (const auto& o : outputs) {
    auto s = score_pair(o.text, *refs.at(o.id), *srcs.at(o.id), opt, stopwords);
    report.add(s);
    per_pair.emplace_back(o.id, s);
  }
  return {std::move(per_pair), std::move(report)};
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const RougeScore& s) {
  return {{"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
}

/// Per-pair record: {id, r1, r2, rl, overlap, repeat, tokens}.
inline nlohmann::json to_json(const std::string& id, const PairScore& s) {
  nlohmann::json j;
  j["id"] = id;
  j["r1"] = to_json(s.r1);
  j["r2"] = to_json(s.r2);
  j["rl"] = to_json(s.rl);
  j["overlap"] = s.overlap;
  j["repeat"] = s.repeat;
  j["tokens"] = s.tokens;
  return j;
}

inline PairScore pair_score_from_json(const nlohmann::json& j) {
  auto rouge = [](const nlohmann::json& r) {
    return RougeScore{r.at("recall").get<double>(), r.at("precision").get<double>(),
                      r.at("f1").get<double>()};
  };
  PairScore s;
  s.r1 = rouge(j.at("r1"));
  s.r2 = rouge(j.at("r2"));
  s.rl = rouge(j.at("rl"));
  s.overlap = j.at("overlap").get<double>();
  s.repeat = j.at("repeat").get<double>();
  s.tokens = j.at("tokens").get<std::size_t>();
  return s;
}

inline nlohmann::json to_json(const ScoreReport& r) {
  nlohmann::json j;
  j["pairs"] = r.pairs;
  for (std::size_t k = 0; k < kScoreColumns.size(); ++k)
    j["columns"][std::string(kScoreColumns[k])] = {{"mean", r.stats[k].mean()},
                                                    {"std", r.stats[k].stddev()}};
  j["meteor"] = "not computed (requires external resources)";
  return j;
}

/// Fixed-width table in the layout of the usual results tables.
inline std::string format_report(const ScoreReport& r, std::string_view system) {
  auto cell = [&](std::string_view col) {
    const auto& s = r.column(col);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s.mean());
    return std::string(buf);
  };
  auto pm = [&](std::string_view col, double scale, const char* fmt) {
    const auto& s = r.column(col);
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, s.mean() * scale, s.stddev() * scale);
    return std::string(buf);
  };
  char line[512];
  std::string out;
  std::snprintf(line, sizeof line, "%-12s %7s %7s %7s %9s %14s %14s %14s\n", "system", "R-1",
                "R-2", "R-L", "METEOR", "Overlap", "Repeat", "Tokens");
  out += line;
  std::snprintf(line, sizeof line, "%-12.12s %7s %7s %7s %9s %14s %14s %14s\n",
                std::string(system).c_str(), cell("r1_f1").c_str(), cell("r2_f1").c_str(),
                cell("rl_f1").c_str(), "n/a", pm("overlap", 100.0, "%.0f%% +- %.0f%%").c_str(),
                pm("repeat", 100.0, "%.0f%% +- %.0f%%").c_str(),
                pm("tokens", 1.0, "%.0f +- %.0f").c_str());
  out += line;
  std::snprintf(line, sizeof line, "pairs: %llu; ROUGE columns are F1 means (see report file for recall/precision)\n",
                static_cast<unsigned long long>(r.pairs));
  out += line;
  return out;
}

}  // namespace scisumm
