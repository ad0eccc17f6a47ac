// scisumm: corpus construction, extractive summarization, evaluation and
// selection histograms from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scisumm/scisumm.hpp"

namespace {

using nlohmann::json;
using namespace scisumm;

constexpr std::size_t kBatch = 256;

struct Common {
  unsigned workers = default_workers();
  std::string stopwords_path;
};

const Stopwords& load_stopword_list(const Common& c) {
  static Stopwords custom;
  std::string path = c.stopwords_path;
  if (path.empty())
    if (const char* env = std::getenv("SCISUMM_STOPWORDS")) path = env;
  if (path.empty()) return default_stopwords();
  custom = load_stopwords(path);
  log::info("stopwords: " + std::to_string(custom.size()) + " entries from " + path);
  return custom;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

/// Fully resolved options of a subcommand, defaults included.
json resolved_config(const CLI::App& sub, const Common& common, const std::string& stopwords) {
  json j;
  j["subcommand"] = sub.get_name();
  j["version"] = SCISUMM_VERSION;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string key = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (opt->get_type_size() == 0 && r.size() <= 1)
        j["options"][key] = true;
      else
        j["options"][key] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      const auto d = opt->get_default_str();
      j["options"][key] = d.empty() ? json(nullptr) : json(d);
    }
  }
  j["workers"] = common.workers;
  j["stopwords"] = stopwords.empty() ? "builtin" : stopwords;
  return j;
}

void emit_config(const json& config, const std::string& out_path) {
  log::info("run config: " + config.dump());
  if (out_path.empty()) return;
  auto out = open_out(out_path + ".run.json");
  out << config.dump(2) << '\n';
}

std::string stopword_source(const Common& c) {
  if (!c.stopwords_path.empty()) return c.stopwords_path;
  if (const char* env = std::getenv("SCISUMM_STOPWORDS")) return env;
  return "";
}

std::string first_string(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const char* k : keys)
    if (auto it = j.find(k); it != j.end() && it->is_string()) return it->get<std::string>();
  std::string names;
  for (const char* k : keys) names += (names.empty() ? "" : "/") + std::string(k);
  throw DataError(where + ": missing text field (" + names + ")");
}

std::string id_of(const json& j, const std::string& where) {
  auto it = j.find("id");
  if (it == j.end()) throw DataError(where + ": missing \"id\"");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError(where + ": \"id\" is not a string");
}

// Streams JSON objects from a line-delimited file.
class JsonLines {
 public:
  explicit JsonLines(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path);
  }
  std::optional<json> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw DataError(where() + ": not a JSON object");
      return j;
    }
    return std::nullopt;
  }
  std::string where() const { return path_ + ":" + std::to_string(line_no_); }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

std::vector<PairExample> read_batch(PairReader& reader) {
  std::vector<PairExample> batch;
  while (batch.size() < kBatch) {
    auto p = reader.next();
    if (!p) break;
    batch.push_back(std::move(*p));
  }
  return batch;
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string task, in, out, rejects;
};

int run_preprocess(const PreprocessArgs& a, const Common& c, const json& config) {
  const Task task = parse_task(a.task);
  emit_config(config, a.out);
  RecordReader reader(a.in);
  auto out = open_out(a.out);
  std::optional<std::ofstream> rejects;
  if (!a.rejects.empty()) rejects = open_out(a.rejects);
  std::map<std::string, std::size_t> reasons;
  std::size_t accepted = 0;
  for (;;) {
    std::vector<ArticleRecord> batch;
    while (batch.size() < kBatch) {
      auto r = reader.next();
      if (!r) break;
      batch.push_back(std::move(*r));
    }
    if (batch.empty()) break;
    const auto results =
        ordered_map(batch, c.workers, [&](const ArticleRecord& r) { return filter_pair(r, task); });
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (const auto* p = std::get_if<PairExample>(&results[i])) {
        out << to_json(*p).dump() << '\n';
        ++accepted;
      } else {
        const auto reason = std::string(to_string(std::get<RejectReason>(results[i])));
        ++reasons[reason];
        if (rejects) *rejects << json{{"id", batch[i].id}, {"reason", reason}}.dump() << '\n';
      }
    }
  }
  std::string summary = "accepted " + std::to_string(accepted);
  for (const auto& [r, n] : reasons) summary += ", " + r + " " + std::to_string(n);
  if (reader.skipped()) summary += ", malformed " + std::to_string(reader.skipped());
  log::info(summary);
  return 0;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string in, json_out;
};

int run_stats(const StatsArgs& a, const Common& c, const Stopwords& sw, const json& config) {
  emit_config(config, a.json_out);
  PairReader reader(a.in);
  CorpusStats total;
  for (auto batch = read_batch(reader); !batch.empty(); batch = read_batch(reader)) {
    const auto parts = ordered_map(batch, c.workers, [&](const PairExample& p) {
      CorpusStats s;
      s.add(p, sw);
      return s;
    });
    for (const auto& s : parts) total.merge(s);
  }
  if (total.examples == 0) throw DataError(a.in + ": no pairs");
  std::cout << to_key_value(total);
  if (!a.json_out.empty()) open_out(a.json_out) << to_json(total).dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string in, prefix;
  std::uint64_t seed = 0;
  std::vector<double> fractions{0.8, 0.1, 0.1};
};

int run_split(const SplitArgs& a, const json& config) {
  if (a.fractions.size() != 3) throw UsageError("--fractions takes exactly three values");
  const SplitFractions f{a.fractions[0], a.fractions[1], a.fractions[2]};
  f.validate();
  emit_config(config, a.prefix);
  PairReader reader(a.in);
  auto train = open_out(a.prefix + ".train.jsonl");
  auto valid = open_out(a.prefix + ".valid.jsonl");
  auto test = open_out(a.prefix + ".test.jsonl");
  std::size_t n[3] = {0, 0, 0};
  while (auto j = reader.next_json()) {
    const auto split = assign_split(id_of(*j, a.in), a.seed, f);
    auto& out = split == Split::train ? train : split == Split::valid ? valid : test;
    out << j->dump() << '\n';
    ++n[static_cast<int>(split)];
  }
  log::info("train " + std::to_string(n[0]) + ", valid " + std::to_string(n[1]) + ", test " +
            std::to_string(n[2]));
  return 0;
}

// ---------------------------------------------------------------------------

IdfTable idf_from_sources(const std::string& path) {
  PairReader reader(path);
  IdfBuilder b;
  while (auto p = reader.next()) b.add(p->source);
  return b.build();
}

struct BuildIdfArgs {
  std::string in, out;
};

int run_build_idf(const BuildIdfArgs& a, const json& config) {
  emit_config(config, a.out);
  const auto idf = idf_from_sources(a.in);
  save_idf(idf, a.out);
  log::info("IDF over " + std::to_string(idf.doc_count()) + " documents, " +
            std::to_string(idf.frequencies().size()) + " terms");
  return 0;
}

// ---------------------------------------------------------------------------

struct SummarizeArgs {
  std::string system, in, out, emb, idf, similarity = "reciprocal";
  std::size_t k = 0, token_budget = 0;
  double damping = 0.85, tol = 1e-8, threshold = 0.1, sigma = 1.0;
  int max_iter = 200;
};

int run_summarize(const SummarizeArgs& a, const Common& c, const Stopwords& sw, json config) {
  SummarizerConfig cfg;
  cfg.system = parse_system(a.system);
  if (a.k > 0) cfg.k = a.k;
  if (a.token_budget > 0) cfg.token_budget = a.token_budget;
  cfg.rwmd.pagerank = {a.damping, a.tol, a.max_iter};
  cfg.lexrank.pagerank = cfg.rwmd.pagerank;
  cfg.lexrank.threshold = a.threshold;
  if (a.similarity == "exp")
    cfg.rwmd.graph.transform = {DistanceTransform::Kind::exponential, a.sigma};
  cfg.stopwords = &sw;

  std::optional<EmbeddingTable> emb;
  if (needs_embeddings(cfg.system)) {
    if (a.emb.empty()) throw UsageError(a.system + " requires --emb");
    emb = load_embeddings(a.emb, guess_embedding_format(a.emb));
    cfg.embeddings = &*emb;
    log::info("embeddings: " + std::to_string(emb->size()) + " x " + std::to_string(emb->dimension()));
  }
  std::optional<IdfTable> idf;
  if (needs_idf(cfg.system)) {
    if (!a.idf.empty()) {
      idf = load_idf(a.idf);
    } else {
      idf = idf_from_sources(a.in);
      config["idf_source"] = "built from --in sources";
    }
    cfg.idf = &*idf;
  }
  config["resolved"] = {{"k", a.k > 0 ? json(a.k) : json("1 for title-gen, 10 for abstract-gen")},
                        {"budget", a.token_budget > 0 ? "tokens" : "sentences"},
                        {"similarity_transform", cfg.rwmd.graph.transform.describe()},
                        {"tf_scope", "document"},
                        {"idf", "ln((1+N)/(1+df))+1"}};
  emit_config(config, a.out);

  PairReader reader(a.in);
  auto out = open_out(a.out);
  std::size_t docs = 0;
  for (auto batch = read_batch(reader); !batch.empty(); batch = read_batch(reader)) {
    const auto records = ordered_map(batch, c.workers, [&](const PairExample& p) {
      if (p.source.empty()) throw DataError(a.in + ": pair '" + p.id + "' has an empty source");
      return summary_record(p, summarize(p, cfg)).dump();
    });
    for (const auto& r : records) out << r << '\n';
    docs += batch.size();
  }
  log::info(a.system + ": summarized " + std::to_string(docs) + " documents");
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string system_out, refs, sources, report, per_pair, name;
  bool desegment = false;
  bool no_punct = false;
};

TokenizedText read_text(const std::string& raw, bool deseg) {
  return parse_segmented(deseg ? desegment(raw) : raw);
}

int run_evaluate(const EvaluateArgs& a, const Common& c, const Stopwords& sw, const json& config) {
  emit_config(config, a.report);
  std::unordered_map<std::string, std::string> outputs, refs;
  std::vector<std::string> output_order;
  {
    JsonLines in(a.system_out);
    while (auto j = in.next()) {
      auto id = id_of(*j, in.where());
      output_order.push_back(id);
      outputs[id] = first_string(*j, {"summary_text", "text", "summary"}, in.where());
    }
  }
  {
    JsonLines in(a.refs);
    while (auto j = in.next())
      refs[id_of(*j, in.where())] = first_string(*j, {"target", "text", "summary_text", "reference"}, in.where());
  }
  std::vector<std::string> missing;
  for (const auto& id : output_order)
    if (!refs.count(id)) missing.push_back(id + " (no reference)");

  ScoreOptions opt;
  opt.rouge.include_punctuation = !a.no_punct;
  ScoreReport report;
  std::vector<std::string> per_pair;
  std::unordered_map<std::string, bool> scored;
  JsonLines src(a.sources);
  for (;;) {
    std::vector<std::pair<std::string, std::string>> batch;
    while (batch.size() < kBatch) {
      auto j = src.next();
      if (!j) break;
      auto id = id_of(*j, src.where());
      auto text = first_string(*j, {"source", "text"}, src.where());
      if (!outputs.count(id)) {
        missing.push_back(id + " (no system output)");
        continue;
      }
      batch.emplace_back(std::move(id), std::move(text));
    }
    if (batch.empty()) break;
    const auto scores = ordered_map(batch, c.workers, [&](const std::pair<std::string, std::string>& p) {
      const auto cand = read_text(outputs.at(p.first), a.desegment);
      auto rit = refs.find(p.first);
      if (rit == refs.end()) return std::optional<PairScore>{};
      const auto ref = read_text(rit->second, a.desegment);
      if (ref.empty()) throw DataError("empty reference for '" + p.first + "'");
      return std::optional<PairScore>(score_pair(cand, ref, parse_segmented(p.second), opt, sw));
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      scored[batch[i].first] = true;
      if (!scores[i]) continue;
      report.add(*scores[i]);
      per_pair.push_back(to_json(batch[i].first, *scores[i]).dump());
    }
  }
  for (const auto& id : output_order)
    if (!scored.count(id)) missing.push_back(id + " (no source)");
  if (!missing.empty()) throw DataError("id mismatch: " + detail::list_ids(missing));

  std::cout << format_report(report, a.name);
  auto j = to_json(report);
  j["system"] = a.name;
  open_out(a.report) << j.dump(2) << '\n';
  if (!a.per_pair.empty()) {
    auto out = open_out(a.per_pair);
    for (const auto& line : per_pair) out << line << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct HistogramArgs {
  std::string selections, generated, sources, emb, out;
  bool normalized = false;
  std::size_t bins = 20;
};

int run_histogram(const HistogramArgs& a, const Common& c, const Stopwords& sw, const json& config) {
  const auto mode = a.normalized ? HistogramMode::normalized_position : HistogramMode::absolute_index;
  HistogramAccumulator acc(mode, a.bins);
  emit_config(config, a.out);
  if (!a.selections.empty()) {
    if (!a.generated.empty()) throw UsageError("use either --selections or --generated, not both");
    JsonLines in(a.selections);
    while (auto j = in.next()) {
      try {
        const auto idx = j->at("selected_indices").get<std::vector<std::size_t>>();
        acc.add(idx, j->at("num_sentences").get<std::size_t>());
      } catch (const json::exception& e) {
        throw DataError(in.where() + ": " + e.what());
      }
    }
  } else {
    if (a.generated.empty() || a.sources.empty() || a.emb.empty())
      throw UsageError("--generated requires --sources and --emb (or pass --selections)");
    const auto emb = load_embeddings(a.emb, guess_embedding_format(a.emb));
    std::unordered_map<std::string, std::string> generated;
    {
      JsonLines in(a.generated);
      while (auto j = in.next())
        generated[id_of(*j, in.where())] = first_string(*j, {"summary_text", "text", "summary"}, in.where());
    }
    std::size_t skipped = 0, matched = 0;
    JsonLines src(a.sources);
    for (;;) {
      std::vector<std::pair<std::string, std::string>> batch;
      while (batch.size() < kBatch) {
        auto j = src.next();
        if (!j) break;
        auto id = id_of(*j, src.where());
        if (!generated.count(id)) continue;
        batch.emplace_back(std::move(id), first_string(*j, {"source", "text"}, src.where()));
      }
      if (batch.empty()) break;
      const auto aligned = ordered_map(batch, c.workers, [&](const std::pair<std::string, std::string>& p) {
        const auto source = parse_segmented(p.second);
        auto al = align_generated(parse_segmented(generated.at(p.first)), source, emb, sw);
        return std::make_pair(std::move(al), source.size());
      });
      for (const auto& [al, n] : aligned) {
        acc.add(al.indices, n);
        skipped += al.skipped;
      }
      matched += batch.size();
    }
    if (matched != generated.size())
      throw DataError(std::to_string(generated.size() - matched) + " generated summaries have no source");
    log::info("aligned " + std::to_string(matched) + " summaries; skipped " + std::to_string(skipped) +
              " incomparable sentences");
  }
  open_out(a.out) << to_csv(acc.finish());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extractive summarization and evaluation for scientific articles", "scisumm"};
  app.set_version_flag("--version", std::string("scisumm ") + SCISUMM_VERSION + " (C++" +
                                        std::to_string(__cplusplus / 100 % 100) + ", " + __VERSION__ + ")");
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", common.workers, "Worker threads")->capture_default_str();
    sub->add_option("--stopwords", common.stopwords_path,
                    "Stopword file (one per line, '#' comments); overrides SCISUMM_STOPWORDS");
  };

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Normalize, tokenize and length-filter article records");
  preprocess->add_option("--task", pre.task, "title-gen or abstract-gen")
      ->required()
      ->check(CLI::IsMember({"title-gen", "abstract-gen"}));
  preprocess->add_option("--in", pre.in, "Article records (JSON lines)")->required();
  preprocess->add_option("--out", pre.out, "Output pair file")->required();
  preprocess->add_option("--keep-rejects", pre.rejects, "Write rejected ids and reasons here");
  add_common(preprocess);

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Corpus statistics of a pair file");
  stats->add_option("--in", st.in, "Pair file")->required();
  stats->add_option("--json", st.json_out, "Also write the statistics as a JSON object");
  add_common(stats);

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Seeded train/valid/test split of a pair file");
  split->add_option("--in", sp.in, "Pair file")->required();
  split->add_option("--out-prefix", sp.prefix, "Writes PREFIX.{train,valid,test}.jsonl")->required();
  split->add_option("--seed", sp.seed, "Hash seed")->capture_default_str();
  split->add_option("--fractions", sp.fractions, "train valid test fractions")->expected(3)->delimiter(',');
  add_common(split);

  BuildIdfArgs bi;
  auto* build_idf = app.add_subcommand("build-idf", "Document frequencies over the sources of a pair file");
  build_idf->add_option("--in", bi.in, "Pair file")->required();
  build_idf->add_option("--out", bi.out, "IDF table")->required();
  add_common(build_idf);

  SummarizeArgs su;
  auto add_summarize_options = [&](CLI::App* sub, bool with_system) {
    if (with_system) {
      std::vector<std::string> names(kSystemNames.begin(), kSystemNames.end());
      sub->add_option("--system", su.system, "lead, tfidf-emb, rwmd-rank, lexrank or oracle")
          ->required()
          ->check(CLI::IsMember(names));
    }
    sub->add_option("--in", su.in, "Pair file")->required();
    sub->add_option("--out", su.out, "Summary records (JSON lines)")->required();
    sub->add_option("--emb", su.emb, "word2vec model (.bin binary, otherwise text)");
    if (with_system) {
      sub->add_option("--k", su.k, "Sentences to select (default 1 for title-gen, 10 for abstract-gen)");
      sub->add_option("--token-budget", su.token_budget, "Select until the summary exceeds this many tokens");
      sub->add_option("--idf", su.idf, "IDF table (default: built from the --in sources)");
      sub->add_option("--damping", su.damping, "PageRank damping")->capture_default_str();
      sub->add_option("--tol", su.tol, "PageRank L1 tolerance")->capture_default_str();
      sub->add_option("--max-iter", su.max_iter, "PageRank iteration cap")->capture_default_str();
      sub->add_option("--threshold", su.threshold, "LexRank similarity threshold")->capture_default_str();
      sub->add_option("--similarity", su.similarity, "RWMD distance transform: reciprocal or exp")
          ->check(CLI::IsMember({"reciprocal", "exp"}))
          ->capture_default_str();
      sub->add_option("--sigma", su.sigma, "Scale of the exp transform")->capture_default_str();
    }
    add_common(sub);
  };
  auto* summarize_cmd = app.add_subcommand("summarize", "Run an extractive system over a pair file");
  add_summarize_options(summarize_cmd, true);
  auto* oracle_cmd = app.add_subcommand("oracle", "RWMD oracle: closest input sentence per reference sentence");
  add_summarize_options(oracle_cmd, false);
  oracle_cmd->get_option("--emb")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "ROUGE-1/2/L, Overlap, Repeat and token counts");
  evaluate->add_option("--system-out", ev.system_out, "System outputs (summary_text or text field)")->required();
  evaluate->add_option("--refs", ev.refs, "References (target or text field)")->required();
  evaluate->add_option("--sources", ev.sources, "Sources (source or text field)")->required();
  evaluate->add_option("--report", ev.report, "Aggregate report (JSON)")->required();
  evaluate->add_option("--per-pair", ev.per_pair, "Per-pair scores (JSON lines)");
  evaluate->add_option("--name", ev.name, "System name for the table")->capture_default_str();
  evaluate->add_flag("--desegment", ev.desegment, "Merge '@@ ' subword markers before scoring");
  evaluate->add_flag("--no-punct", ev.no_punct, "Ignore punctuation tokens in ROUGE");
  add_common(evaluate);

  HistogramArgs hi;
  auto* histogram = app.add_subcommand("histogram", "Sentence-selection location histogram (CSV)");
  histogram->add_option("--selections", hi.selections, "Summary records with selected_indices");
  histogram->add_option("--generated", hi.generated, "Generated summaries to align by RWMD");
  histogram->add_option("--sources", hi.sources, "Sources of the generated summaries");
  histogram->add_option("--emb", hi.emb, "word2vec model for alignment");
  histogram->add_flag("--normalized", hi.normalized, "Bin positions i/n instead of raw indices");
  histogram->add_option("--bins", hi.bins, "Number of bins")->capture_default_str();
  histogram->add_option("--out", hi.out, "CSV output (bin_start,bin_end,mass)")->required();
  add_common(histogram);

  ev.name = "system";

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    for (const CLI::App* sub : app.get_subcommands())
      std::cerr << "\n" << sub->help();
    return 1;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string sw_source = stopword_source(common);
    const Stopwords& sw = load_stopword_list(common);
    json config = resolved_config(*sub, common, sw_source);
    if (sub == preprocess) return run_preprocess(pre, common, config);
    if (sub == stats) return run_stats(st, common, sw, config);
    if (sub == split) return run_split(sp, config);
    if (sub == build_idf) return run_build_idf(bi, config);
    if (sub == summarize_cmd) return run_summarize(su, common, sw, config);
    if (sub == oracle_cmd) {
      su.system = "oracle";
      return run_summarize(su, common, sw, config);
    }
    if (sub == evaluate) return run_evaluate(ev, common, sw, config);
    if (sub == histogram) return run_histogram(hi, common, sw, config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
