#pragma once

// Fixture builders and brute-force reference implementations shared by the
// unit tests and the acceptance runner. Nothing in here calls the library
// routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scisumm/scisumm.hpp"

namespace testing_support {

using namespace scisumm;

inline TokenizedText doc(std::string_view raw) { return split_sentences(normalize(raw)); }

inline Sentence sentence_of(const std::vector<std::string>& words) {
  Sentence s;
  for (const auto& w : words) s.tokens.push_back(make_token(w));
  return s;
}

inline TokenizedText text_of(const std::vector<std::vector<std::string>>& sentences) {
  TokenizedText t;
  for (const auto& s : sentences) t.sentences.push_back(sentence_of(s));
  return t;
}

/// Words "w0".."w{n-1}" with standard-normal vectors.
inline EmbeddingTable random_table(std::size_t words, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  EmbeddingTable t(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < words; ++i) {
    for (auto& x : v) x = static_cast<float>(g(rng));
    t.set("w" + std::to_string(i), v);
  }
  return t;
}

inline std::vector<std::string> random_words(std::size_t n, std::size_t vocab, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(pick(rng)));
  return out;
}

// ---------------------------------------------------------------------------
// ROUGE by definition

inline std::map<std::vector<std::string>, int> brute_ngrams(const std::vector<std::string>& t, std::size_t n) {
  std::map<std::vector<std::string>, int> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[std::vector<std::string>(t.begin() + i, t.begin() + i + n)];
  return out;
}

struct BruteRouge {
  double recall, precision, f1;
};

inline BruteRouge brute_prf(double hit, double ref_total, double cand_total) {
  BruteRouge r{0, 0, 0};
  if (ref_total > 0) r.recall = hit / ref_total;
  if (cand_total > 0) r.precision = hit / cand_total;
  if (r.recall + r.precision > 0) r.f1 = 2 * r.recall * r.precision / (r.recall + r.precision);
  return r;
}

inline BruteRouge brute_rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                                std::size_t n) {
  const auto c = brute_ngrams(cand, n), r = brute_ngrams(ref, n);
  int hit = 0, rt = 0, ct = 0;
  for (const auto& [g, k] : r) {
    rt += k;
    auto it = c.find(g);
    if (it != c.end()) hit += std::min(k, it->second);
  }
  for (const auto& [g, k] : c) ct += k;
  return brute_prf(hit, rt, ct);
}

// Suffix-oriented table, filled back to front.
inline std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;)
    for (std::size_t j = b.size(); j-- > 0;)
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
  return t[0][0];
}

inline BruteRouge brute_rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  return brute_prf(static_cast<double>(brute_lcs(cand, ref)), static_cast<double>(ref.size()),
                   static_cast<double>(cand.size()));
}

// ---------------------------------------------------------------------------
// RWMD by definition

inline std::vector<double> vec_of(const EmbeddingTable& t, const std::string& w) {
  const auto v = t.vector(*t.id(w));
  return {v.begin(), v.end()};
}

inline double brute_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// Σ_{x∈a} min_{y∈b} ‖E(x) − E(y)‖ over every token (all tokens in-vocabulary).
inline double brute_rwmd_directional(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                     const EmbeddingTable& t) {
  double total = 0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, brute_dist(vec_of(t, x), vec_of(t, y)));
    total += best;
  }
  return total;
}

/// Cost of every complete assignment of the tokens of `a` to tokens of `b`
/// (each token of `a` sends all its mass to one token of `b`), enumerated
/// exhaustively: |b|^|a| entries.
inline std::vector<double> assignment_costs(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                            const EmbeddingTable& t) {
  std::vector<double> out;
  std::vector<std::size_t> choice(a.size(), 0);
  for (;;) {
    double cost = 0;
    for (std::size_t k = 0; k < a.size(); ++k) cost += brute_dist(vec_of(t, a[k]), vec_of(t, b[choice[k]]));
    out.push_back(cost);
    std::size_t k = 0;
    while (k < a.size() && ++choice[k] == b.size()) choice[k++] = 0;
    if (k == a.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// PageRank by dense linear solve

/// Solves (I − d·M) p = (1 − d)/n · 1 by Gaussian elimination with partial
/// pivoting, where M is the column-stochastic matrix of `w` without
/// self-loops and dangling columns are uniform.
inline std::vector<double> dense_pagerank(const std::vector<double>& w, std::size_t n, double d) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) col += w[i * n + j];
    for (std::size_t i = 0; i < n; ++i)
      m[i][j] = col > 0 ? (i != j ? w[i * n + j] / col : 0.0) : 1.0 / static_cast<double>(n);
  }
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - d * m[i][j];
    a[i][n] = (1.0 - d) / static_cast<double>(n);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> p(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += p[i] = a[i][n] / a[i][i];
  for (auto& x : p) x /= total;
  return p;
}

// ---------------------------------------------------------------------------
// Overlap / Repeat by set arithmetic

inline std::set<std::string> brute_content(const std::vector<std::string>& words, const Stopwords& sw) {
  std::set<std::string> out;
  for (const auto& w : words) {
    const Token t = make_token(w);
    if (t.kind == TokenKind::word && !sw.contains(w)) out.insert(w);
  }
  return out;
}

inline double brute_overlap(const std::vector<std::string>& cand, const std::vector<std::string>& src,
                            const Stopwords& sw) {
  const auto c = brute_content(cand, sw), s = brute_content(src, sw);
  if (c.empty()) return 0.0;
  std::vector<std::string> both;
  std::set_intersection(c.begin(), c.end(), s.begin(), s.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(c.size());
}

inline double brute_repeat(const std::vector<std::vector<std::string>>& sentences, const Stopwords& sw) {
  double total = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::vector<std::string> rest;
    for (std::size_t j = 0; j < sentences.size(); ++j)
      if (j != i) rest.insert(rest.end(), sentences[j].begin(), sentences[j].end());
    total += brute_overlap(sentences[i], rest, sw);
  }
  return total / static_cast<double>(sentences.size());
}

}  // namespace testing_support
