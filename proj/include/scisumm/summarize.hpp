#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "scisumm/corpus.hpp"
#include "scisumm/embed.hpp"
#include "scisumm/error.hpp"
#include "scisumm/rank.hpp"

namespace scisumm {

enum class System { lead, tfidf_emb, rwmd_rank, lexrank, oracle };

inline constexpr std::array<std::string_view, 5> kSystemNames = {"lead", "tfidf-emb", "rwmd-rank",
                                                                 "lexrank", "oracle"};

inline std::string_view to_string(System s) { return kSystemNames[static_cast<std::size_t>(s)]; }

inline System parse_system(std::string_view name) {
  for (std::size_t i = 0; i < kSystemNames.size(); ++i)
    if (kSystemNames[i] == name) return static_cast<System>(i);
  std::string valid;
  for (auto n : kSystemNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw UsageError("unknown system '" + std::string(name) + "'; valid systems: " + valid);
}

inline bool needs_embeddings(System s) {
  return s == System::tfidf_emb || s == System::rwmd_rank || s == System::oracle;
}

inline bool needs_idf(System s) { return s == System::tfidf_emb || s == System::lexrank; }

struct SummarizerConfig {
  System system = System::lead;
  std::optional<std::size_t> k;             // default: 1 for title-gen, 10 for abstract-gen
  std::optional<std::size_t> token_budget;  // overrides k when set
  RwmdRankOptions rwmd;
  LexRankOptions lexrank;
  const EmbeddingTable* embeddings = nullptr;
  const IdfTable* idf = nullptr;
  const Stopwords* stopwords = &default_stopwords();
};

inline std::size_t default_k(Task task) { return task == Task::title_gen ? 1 : 10; }

inline Budget budget_for(const SummarizerConfig& c, Task task) {
  if (c.token_budget) return Budget::tokens(*c.token_budget);
  return Budget::sentences(c.k.value_or(default_k(task)));
}

/// Runs the configured system on the source of `pair` (the oracle also reads
/// its target).
inline RankedSelection summarize(const PairExample& pair, const SummarizerConfig& c) {
  if (needs_embeddings(c.system) && !c.embeddings)
    throw UsageError(std::string(to_string(c.system)) + " requires embeddings");
  if (needs_idf(c.system) && !c.idf)
    throw UsageError(std::string(to_string(c.system)) + " requires an IDF table");
  const Budget budget = budget_for(c, pair.task);
  const Stopwords& sw = *c.stopwords;
  switch (c.system) {
    case System::lead: return lead(pair.source, budget);
    case System::tfidf_emb: return centroid_rank(pair.source, *c.embeddings, *c.idf, budget, sw);
    case System::rwmd_rank: return rwmd_rank(pair.source, *c.embeddings, budget, c.rwmd, sw);
    case System::lexrank: return lexrank_classic(pair.source, *c.idf, budget, c.lexrank, sw);
    case System::oracle: return oracle(pair.source, pair.target, *c.embeddings, sw);
  }
  throw UsageError("unreachable system");
}

inline TokenizedText selected_text(const TokenizedText& doc, const RankedSelection& sel) {
  TokenizedText out;
  for (auto i : sel.selected) out.sentences.push_back(doc.sentences.at(i));
  return out;
}

/// {id, selected_indices, scores, summary_text, num_sentences}
inline nlohmann::json summary_record(const PairExample& pair, const RankedSelection& sel) {
  nlohmann::json j;
  j["id"] = pair.id;
  j["selected_indices"] = sel.selected;
  auto scores = nlohmann::json::array();
  for (const auto& s : sel.scores) scores.push_back({{"index", s.index}, {"salience", s.salience}});
  j["scores"] = std::move(scores);
  j["summary_text"] = to_segmented(selected_text(pair.source, sel));
  j["num_sentences"] = pair.source.size();
  return j;
}

}  // namespace scisumm
