#pragma once

// Extractive summarizers: lead, TF-IDF embedding centroid, RWMD centrality
// (RWMD similarity graph + PageRank), classic LexRank, and the RWMD oracle.
//
// Every ranker returns a RankedSelection whose `selected` indices are in
// document order. Ties are always broken towards the lower sentence index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scisumm/embed.hpp"
#include "scisumm/error.hpp"
#include "scisumm/textproc.hpp"

namespace scisumm {

// ---------------------------------------------------------------------------
// Selection

struct Budget {
  enum class Kind { sentences, tokens, none };
  Kind kind = Kind::sentences;
  std::size_t limit = 1;

  static Budget sentences(std::size_t k) { return {Kind::sentences, k}; }
  /// Adds sentences in rank order until the summary exceeds `cap` tokens.
  static Budget tokens(std::size_t cap) { return {Kind::tokens, cap}; }
  static Budget none() { return {Kind::none, 0}; }
};

struct ScoredSentence {
  std::size_t index = 0;
  double salience = 0.0;

  friend bool operator==(const ScoredSentence&, const ScoredSentence&) = default;
};

struct RankedSelection {
  std::vector<ScoredSentence> scores;  // best first
  std::vector<std::size_t> selected;   // ascending
  Budget budget;
};

namespace detail {

// Scores closer than this are ties; keeps rankings stable across
// platforms where the last bits of a sum differ.
inline constexpr double kTieQuantum = 1e-12;

inline long long quantize(double s) { return std::llround(s / kTieQuantum); }

}  // namespace detail

/// Orders sentences (eligible first, then salience descending, then index
/// ascending) and applies the budget. Ineligible sentences are only
/// selected when nothing eligible is left.
inline RankedSelection select_top(std::span<const double> salience,
                                  std::span<const char> eligible,
                                  std::span<const std::size_t> lengths, Budget budget) {
  const std::size_t n = salience.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if ((eligible[a] != 0) != (eligible[b] != 0)) return eligible[a] != 0;
    const auto qa = detail::quantize(salience[a]);
    const auto qb = detail::quantize(salience[b]);
    if (qa != qb) return qa > qb;
    return a < b;
  });
  RankedSelection out;
  out.budget = budget;
  out.scores.reserve(n);
  for (std::size_t i : order) out.scores.push_back({i, salience[i]});
  std::size_t tokens = 0;
  for (std::size_t i : order) {
    if (budget.kind == Budget::Kind::sentences && out.selected.size() >= budget.limit) break;
    if (budget.kind == Budget::Kind::tokens && tokens > budget.limit) break;
    out.selected.push_back(i);
    tokens += lengths[i];
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

namespace detail {

inline void require_document(const TokenizedText& d, const char* what) {
  if (d.empty()) throw DataError(std::string(what) + ": empty document");
}

inline void require_budget(Budget b) {
  if (b.kind == Budget::Kind::sentences && b.limit == 0)
    throw UsageError("sentence budget must be at least 1");
}

inline std::vector<std::size_t> sentence_lengths(const TokenizedText& d) {
  std::vector<std::size_t> out;
  for (const auto& s : d.sentences) out.push_back(s.size());
  return out;
}

inline RankedSelection finish(const TokenizedText& d, const std::vector<double>& salience,
                              const std::vector<char>& eligible, Budget budget) {
  const auto lengths = sentence_lengths(d);
  return select_top(salience, eligible, lengths, budget);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lead

/// First sentences in document order; salience 1/(1+index).
inline RankedSelection lead(const TokenizedText& d, Budget budget) {
  detail::require_document(d, "lead");
  detail::require_budget(budget);
  std::vector<double> salience(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) salience[i] = 1.0 / (1.0 + static_cast<double>(i));
  return detail::finish(d, salience, std::vector<char>(d.size(), 1), budget);
}

inline RankedSelection lead(const TokenizedText& d, std::size_t k) {
  return lead(d, Budget::sentences(k));
}

// ---------------------------------------------------------------------------
// TF-IDF embedding centroid

/// Salience is the cosine between each sentence embedding and the document
/// centroid (both TF-IDF weighted centroids of word embeddings).
inline RankedSelection centroid_rank(const TokenizedText& d, const EmbeddingTable& emb,
                                     const IdfTable& idf, Budget budget,
                                     const Stopwords& stopwords = default_stopwords()) {
  detail::require_document(d, "tfidf-emb");
  detail::require_budget(budget);
  const auto tf = term_frequencies(d);
  const auto centroid = document_embedding(d, emb, idf, stopwords);
  std::vector<double> salience(d.size(), 0.0);
  std::vector<char> eligible(d.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = sentence_embedding(d.sentences[i], emb, idf, tf, stopwords);
    eligible[i] = r.content_token_count > 0;
    salience[i] = eligible[i] ? cosine(r, centroid) : 0.0;
  }
  return detail::finish(d, salience, eligible, budget);
}

inline RankedSelection centroid_rank(const TokenizedText& d, const EmbeddingTable& emb,
                                     const IdfTable& idf, std::size_t k) {
  return centroid_rank(d, emb, idf, Budget::sentences(k));
}

// ---------------------------------------------------------------------------
// Relaxed word mover's distance

using TokenRows = std::vector<EmbeddingTable::Id>;

/// Embedding rows of the in-vocabulary content tokens of `s`, in order
/// (repeated tokens repeat).
inline TokenRows content_rows(const Sentence& s, const EmbeddingTable& emb,
                              const Stopwords& stopwords = default_stopwords()) {
  TokenRows rows;
  for (const auto& t : s.tokens) {
    if (!is_content(t, stopwords)) continue;
    if (auto id = emb.id(t.surface)) rows.push_back(*id);
  }
  return rows;
}

inline std::vector<TokenRows> content_rows(const TokenizedText& d, const EmbeddingTable& emb,
                                           const Stopwords& stopwords = default_stopwords()) {
  std::vector<TokenRows> out;
  out.reserve(d.size());
  for (const auto& s : d.sentences) out.push_back(content_rows(s, emb, stopwords));
  return out;
}

inline double euclidean(std::span<const float> a, std::span<const float> b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

/// Both directional relaxed costs of a pair, computed from one pass over the
/// pairwise distance grid.
struct RwmdPair {
  double forward = 0.0;   // sum over a of the nearest b
  double backward = 0.0;  // sum over b of the nearest a
  double symmetric() const { return std::max(forward, backward); }
};

inline std::optional<RwmdPair> rwmd_rows(const TokenRows& a, const TokenRows& b,
                                         const EmbeddingTable& emb) {
  if (a.empty() || b.empty()) return std::nullopt;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> col_min(b.size(), inf);
  RwmdPair out;
  for (auto ia : a) {
    const auto va = emb.vector(ia);
    double row_min = inf;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dist = ia == b[j] ? 0.0 : euclidean(va, emb.vector(b[j]));
      row_min = std::min(row_min, dist);
      col_min[j] = std::min(col_min[j], dist);
    }
    out.forward += row_min;
  }
  for (double m : col_min) out.backward += m;
  return out;
}

/// Sum over in-vocabulary content tokens of `a` of the distance to the
/// nearest in-vocabulary content token of `b`. nullopt when either side has
/// no such token (incomparable).
inline std::optional<double> rwmd_directional(const Sentence& a, const Sentence& b,
                                              const EmbeddingTable& emb,
                                              const Stopwords& stopwords = default_stopwords()) {
  const auto r = rwmd_rows(content_rows(a, emb, stopwords), content_rows(b, emb, stopwords), emb);
  if (!r) return std::nullopt;
  return r->forward;
}

/// max(rwmd_directional(a, b), rwmd_directional(b, a)).
inline std::optional<double> rwmd(const Sentence& a, const Sentence& b,
                                  const EmbeddingTable& emb,
                                  const Stopwords& stopwords = default_stopwords()) {
  const auto r = rwmd_rows(content_rows(a, emb, stopwords), content_rows(b, emb, stopwords), emb);
  if (!r) return std::nullopt;
  return r->symmetric();
}

// ---------------------------------------------------------------------------
// Similarity graph

struct DistanceTransform {
  enum class Kind { reciprocal, exponential };
  Kind kind = Kind::reciprocal;
  double sigma = 1.0;

  double operator()(double distance) const {
    return kind == Kind::reciprocal ? 1.0 / (1.0 + distance) : std::exp(-distance / sigma);
  }
  std::string describe() const {
    return kind == Kind::reciprocal ? "1/(1+d)" : "exp(-d/" + std::to_string(sigma) + ")";
  }
};

struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> values;     // row-major n*n similarities
  std::vector<double> distances;  // row-major n*n rwmd, NaN where incomparable

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double distance(std::size_t i, std::size_t j) const { return distances[i * n + j]; }
};

struct GraphOptions {
  DistanceTransform transform;
  unsigned workers = 1;
};

/// Pairwise RWMD turned into similarities; incomparable pairs get 0 and the
/// diagonal is 1.
inline SimilarityMatrix similarity_from_rows(const std::vector<TokenRows>& rows,
                                             const EmbeddingTable& emb,
                                             const GraphOptions& options = {}) {
  const std::size_t n = rows.size();
  SimilarityMatrix m;
  m.n = n;
  m.values.assign(n * n, 0.0);
  m.distances.assign(n * n, std::numeric_limits<double>::quiet_NaN());
  auto fill_row = [&](std::size_t i) {
    m.values[i * n + i] = 1.0;
    if (!rows[i].empty()) m.distances[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto r = rwmd_rows(rows[i], rows[j], emb);
      if (!r) continue;
      const double d = r->symmetric();
      const double s = options.transform(d);
      m.values[i * n + j] = m.values[j * n + i] = s;
      m.distances[i * n + j] = m.distances[j * n + i] = d;
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fill_row(i);
    return m;
  }
  // Interleaved rows balance the triangular workload; each (i, j) entry is
  // written by exactly one thread.
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fill_row(i);
    });
  for (auto& t : pool) t.join();
  return m;
}

inline SimilarityMatrix build_similarity_matrix(const TokenizedText& d, const EmbeddingTable& emb,
                                                const GraphOptions& options = {},
                                                const Stopwords& stopwords = default_stopwords()) {
  return similarity_from_rows(content_rows(d, emb, stopwords), emb, options);
}

// ---------------------------------------------------------------------------
// PageRank

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-8;
  int max_iter = 200;
};

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on the column-normalized weighted graph of `w` (n*n,
/// row-major, symmetric) with uniform teleport. Self-loops are ignored.
/// Nodes without edges are dangling and spread their mass uniformly.
/// Converges when the L1 change drops below `tol`.
inline PageRankResult pagerank(std::span<const double> w, std::size_t n,
                               const PageRankOptions& opt = {}) {
  if (n == 0) throw DataError("pagerank: empty graph");
  if (w.size() != n * n) throw UsageError("pagerank: matrix is not n*n");
  if (!(opt.damping > 0.0 && opt.damping < 1.0))
    throw UsageError("pagerank: damping must lie in (0, 1)");
  if (opt.max_iter < 1) throw UsageError("pagerank: max_iter must be positive");

  std::vector<double> colsum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) colsum[j] += w[i * n + j];
  std::vector<double> transition(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && colsum[j] > 0.0) transition[i * n + j] = w[i * n + j] / colsum[j];

  const double nn = static_cast<double>(n);
  const double teleport = (1.0 - opt.damping) / nn;
  PageRankResult out;
  std::vector<double> p(n, 1.0 / nn), next(n);
  for (int it = 1; it <= opt.max_iter; ++it) {
    double dangling = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (colsum[j] <= 0.0) dangling += p[j];
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += transition[i * n + j] * p[j];
      next[i] = teleport + opt.damping * (acc + dangling / nn);
      change += std::abs(next[i] - p[i]);
    }
    p.swap(next);
    out.iterations = it;
    if (change < opt.tol) {
      out.converged = true;
      break;
    }
  }
  double total = 0.0;
  for (double x : p) total += x;
  // All-equal scores (a symmetric graph) renormalize to exactly 1/n;
  // dividing by a rounded n*v would land an ulp off.
  if (std::adjacent_find(p.begin(), p.end(), std::not_equal_to<>()) == p.end())
    std::fill(p.begin(), p.end(), 1.0 / nn);
  else
    for (double& x : p) x /= total;
  out.scores = std::move(p);
  return out;
}

inline PageRankResult pagerank(const SimilarityMatrix& w, const PageRankOptions& opt = {}) {
  return pagerank(w.values, w.n, opt);
}

// ---------------------------------------------------------------------------
// RWMD centrality

struct RwmdRankOptions {
  PageRankOptions pagerank;
  GraphOptions graph;
};

/// PageRank centrality on the RWMD similarity graph. Sentences with no
/// in-vocabulary content token get salience 0.
inline RankedSelection rwmd_rank(const TokenizedText& d, const EmbeddingTable& emb, Budget budget,
                                 const RwmdRankOptions& options = {},
                                 const Stopwords& stopwords = default_stopwords()) {
  detail::require_document(d, "rwmd-rank");
  detail::require_budget(budget);
  const auto rows = content_rows(d, emb, stopwords);
  const auto w = similarity_from_rows(rows, emb, options.graph);
  auto pr = pagerank(w, options.pagerank);
  std::vector<char> eligible(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    eligible[i] = !rows[i].empty();
    if (!eligible[i]) pr.scores[i] = 0.0;
  }
  return detail::finish(d, pr.scores, eligible, budget);
}

inline RankedSelection rwmd_rank(const TokenizedText& d, const EmbeddingTable& emb, std::size_t k,
                                 double damping = 0.85) {
  RwmdRankOptions o;
  o.pagerank.damping = damping;
  return rwmd_rank(d, emb, Budget::sentences(k), o);
}

// ---------------------------------------------------------------------------
// Classic LexRank

using SparseVector = std::unordered_map<std::string_view, double>;

/// Sentence-level tf times corpus idf over content tokens.
inline SparseVector tfidf_vector(const Sentence& s, const IdfTable& idf,
                                 const Stopwords& stopwords = default_stopwords()) {
  SparseVector v;
  for (const auto& t : s.tokens)
    if (is_content(t, stopwords)) v[t.surface] += 1.0;
  for (auto& [token, weight] : v) weight *= idf.idf(token);
  return v;
}

inline double sparse_cosine(const SparseVector& a, const SparseVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, x] : small)
    if (auto it = large.find(t); it != large.end()) dot += x * it->second;
  for (const auto& [t, x] : a) na += x * x;
  for (const auto& [t, x] : b) nb += x * x;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct LexRankOptions {
  double threshold = 0.1;
  PageRankOptions pagerank;
};

/// TF-IDF cosine graph; similarities below `threshold` are dropped, the
/// rest keep their weight.
inline SimilarityMatrix lexrank_matrix(const TokenizedText& d, const IdfTable& idf,
                                       double threshold,
                                       const Stopwords& stopwords = default_stopwords()) {
  const std::size_t n = d.size();
  std::vector<SparseVector> vectors;
  vectors.reserve(n);
  for (const auto& s : d.sentences) vectors.push_back(tfidf_vector(s, idf, stopwords));
  SimilarityMatrix m;
  m.n = n;
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = i == j ? (vectors[i].empty() ? 0.0 : 1.0) : sparse_cosine(vectors[i], vectors[j]);
      if (s < threshold) s = 0.0;
      m.values[i * n + j] = m.values[j * n + i] = s;
    }
  return m;
}

inline RankedSelection lexrank_classic(const TokenizedText& d, const IdfTable& idf, Budget budget,
                                       const LexRankOptions& options = {},
                                       const Stopwords& stopwords = default_stopwords()) {
  detail::require_document(d, "lexrank");
  detail::require_budget(budget);
  const auto w = lexrank_matrix(d, idf, options.threshold, stopwords);
  auto pr = pagerank(w, options.pagerank);
  std::vector<char> eligible(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool any = false;
    for (const auto& t : d.sentences[i].tokens) any = any || is_content(t, stopwords);
    eligible[i] = any;
    if (!any) pr.scores[i] = 0.0;
  }
  return detail::finish(d, pr.scores, eligible, budget);
}

inline RankedSelection lexrank_classic(const TokenizedText& d, const IdfTable& idf, std::size_t k,
                                       double threshold = 0.1) {
  LexRankOptions o;
  o.threshold = threshold;
  return lexrank_classic(d, idf, Budget::sentences(k), o);
}

// ---------------------------------------------------------------------------
// Oracle

struct NearestSentence {
  std::size_t index = 0;
  double distance = 0.0;
};

/// The candidate with minimal RWMD to `query` (lower index on ties);
/// nullopt when the query is incomparable with every candidate.
inline std::optional<NearestSentence> nearest_sentence(const TokenRows& query,
                                                       const std::vector<TokenRows>& candidates,
                                                       const EmbeddingTable& emb) {
  std::optional<NearestSentence> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto r = rwmd_rows(query, candidates[i], emb);
    if (!r) continue;
    const double d = r->symmetric();
    if (!best || d < best->distance) best = NearestSentence{i, d};
  }
  return best;
}

/// For every reference sentence, the closest input sentence by RWMD.
/// Duplicates are collapsed; salience of a selected sentence is
/// 1/(1+distance) of its closest match.
inline RankedSelection oracle(const TokenizedText& d, const TokenizedText& reference,
                              const EmbeddingTable& emb,
                              const Stopwords& stopwords = default_stopwords()) {
  detail::require_document(d, "oracle");
  if (reference.empty()) throw DataError("oracle: empty reference");
  const auto rows = content_rows(d, emb, stopwords);
  std::vector<double> salience(d.size(), 0.0);
  std::vector<char> chosen(d.size(), 0);
  for (const auto& ref : reference.sentences) {
    const auto hit = nearest_sentence(content_rows(ref, emb, stopwords), rows, emb);
    if (!hit) continue;
    chosen[hit->index] = 1;
    salience[hit->index] = std::max(salience[hit->index], 1.0 / (1.0 + hit->distance));
  }
  std::size_t count = 0;
  for (char c : chosen) count += c;
  auto out = detail::finish(d, salience, chosen, Budget::sentences(std::max<std::size_t>(count, 1)));
  if (count == 0) out.selected.clear();
  out.budget = Budget::none();
  return out;
}

}  // namespace scisumm
