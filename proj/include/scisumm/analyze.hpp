#pragma once

// Where in the input do summaries come from? Maps summary sentences to
// input positions and accumulates location histograms.

#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "scisumm/embed.hpp"
#include "scisumm/error.hpp"
#include "scisumm/rank.hpp"
#include "scisumm/textproc.hpp"

namespace scisumm {

struct Alignment {
  std::vector<std::size_t> indices;  // one per comparable summary sentence
  std::size_t skipped = 0;           // summary sentences with no comparable source sentence
};

/// Closest source sentence (by RWMD) for each summary sentence; shares the
/// argmin rule of oracle().
inline Alignment align_generated(const TokenizedText& summary, const TokenizedText& source,
                                 const EmbeddingTable& emb,
                                 const Stopwords& stopwords = default_stopwords()) {
  if (source.empty()) throw DataError("align_generated: empty source");
  const auto rows = content_rows(source, emb, stopwords);
  Alignment out;
  for (const auto& s : summary.sentences) {
    if (auto hit = nearest_sentence(content_rows(s, emb, stopwords), rows, emb))
      out.indices.push_back(hit->index);
    else
      ++out.skipped;
  }
  return out;
}

enum class HistogramMode { absolute_index, normalized_position };

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  double mass = 0.0;
};

struct LocationHistogram {
  HistogramMode mode = HistogramMode::normalized_position;
  std::vector<HistogramBin> bins;

  double total() const {
    double t = 0.0;
    for (const auto& b : bins) t += b.mass;
    return t;
  }
};

/// Mergeable selection-location counter.
///
/// normalized_position: index i of an n-sentence document falls into bin
/// floor(i * bins / n), i.e. position i/n on equal-width bins over [0, 1);
/// masses are normalized to sum to 1.
/// absolute_index: bin k counts index k, the last bin also takes every
/// index beyond it; masses are raw counts.
class HistogramAccumulator {
 public:
  HistogramAccumulator(HistogramMode mode, std::size_t bin_count) : mode_(mode), counts_(bin_count, 0) {
    if (bin_count < 1) throw UsageError("histogram: bin_count must be at least 1");
  }

  void add(std::span<const std::size_t> indices, std::size_t source_length) {
    const std::size_t bins = counts_.size();
    for (std::size_t i : indices) {
      if (i >= source_length)
        throw DataError("histogram: index " + std::to_string(i) + " outside a document of " +
                        std::to_string(source_length) + " sentences");
      const std::size_t b = mode_ == HistogramMode::normalized_position
                                ? i * bins / source_length
                                : std::min(i, bins - 1);
      ++counts_[b];
    }
  }

  void merge(const HistogramAccumulator& o) {
    if (o.mode_ != mode_ || o.counts_.size() != counts_.size())
      throw UsageError("histogram: cannot merge differently shaped histograms");
    for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += o.counts_[b];
  }

  std::size_t selections() const {
    std::size_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  LocationHistogram finish() const {
    LocationHistogram h;
    h.mode = mode_;
    const double bins = static_cast<double>(counts_.size());
    const double total = static_cast<double>(selections());
    for (std::size_t b = 0; b < counts_.size(); ++b) {
      HistogramBin bin;
      const double k = static_cast<double>(b);
      if (mode_ == HistogramMode::normalized_position) {
        bin.start = k / bins;
        bin.end = (k + 1.0) / bins;
        bin.mass = total > 0.0 ? static_cast<double>(counts_[b]) / total : 0.0;
      } else {
        bin.start = k;
        bin.end = k + 1.0;
        bin.mass = static_cast<double>(counts_[b]);
      }
      h.bins.push_back(bin);
    }
    return h;
  }

 private:
  HistogramMode mode_;
  std::vector<std::size_t> counts_;
};

struct SelectionRecord {
  std::vector<std::size_t> indices;
  std::size_t source_length = 0;
};

template <typename Range>
LocationHistogram selection_histogram(const Range& selections, HistogramMode mode,
                                      std::size_t bin_count) {
  HistogramAccumulator acc(mode, bin_count);
  for (const SelectionRecord& s : selections) acc.add(s.indices, s.source_length);
  return acc.finish();
}

/// CSV with header "bin_start,bin_end,mass".
inline std::string to_csv(const LocationHistogram& h) {
  std::string out = "bin_start,bin_end,mass\n";
  char line[96];
  for (const auto& b : h.bins) {
    std::snprintf(line, sizeof line, "%.6g,%.6g,%.17g\n", b.start, b.end, b.mass);
    out += line;
  }
  return out;
}

}  // namespace scisumm
