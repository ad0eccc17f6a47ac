// Generates the bundled sample: synthetic articles with topic-clustered
// vocabulary plus matching word embeddings. Fully determined by --seed.
//
//   make_sample --out-dir data/sample [--docs 100] [--dim 50] [--seed 7]

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scisumm/embed.hpp"

namespace {

const std::vector<std::vector<std::string>> kTopics = {
    {"protein", "binding", "receptor", "ligand", "kinase", "phosphorylation", "domain", "structure",
     "folding", "complex", "substrate", "enzyme", "activity", "inhibitor", "affinity", "residue"},
    {"patients", "clinical", "trial", "treatment", "therapy", "outcome", "dose", "placebo",
     "randomized", "cohort", "mortality", "hospital", "follow-up", "adverse", "efficacy", "survival"},
    {"gene", "expression", "transcription", "promoter", "mrna", "sequencing", "genome", "mutation",
     "allele", "variant", "regulation", "chromatin", "methylation", "locus", "cd14", "p53"},
    {"neurons", "brain", "cortex", "synaptic", "memory", "cognitive", "hippocampus", "signaling",
     "dopamine", "neural", "plasticity", "stimulation", "behavior", "mice", "lesion", "network"},
    {"infection", "virus", "bacterial", "immune", "antibody", "vaccine", "pathogen", "host",
     "cytokine", "inflammation", "t-cell", "antigen", "response", "replication", "strain", "viral"},
    {"model", "analysis", "statistical", "regression", "data", "estimate", "prediction", "method",
     "algorithm", "simulation", "variance", "sample", "bias", "accuracy", "parameter", "validation"},
};

const std::vector<std::string> kGeneric = {"results", "study", "observed", "increased", "reduced",
                                           "significant", "levels", "effect", "role", "cells",
                                           "samples", "associated", "compared", "showed", "novel"};
// Not in the embedding table, to exercise out-of-vocabulary handling.
const std::vector<std::string> kRare = {"xenopus", "lysate", "immunoblot", "zebrafish", "microglia"};

const std::vector<std::string> kFunction = {"the", "of", "and", "in", "a", "to", "with", "for",
                                            "was", "were", "is", "by", "that", "this", "from"};

class Writer {
 public:
  explicit Writer(std::uint64_t seed) : rng_(seed) {}

  std::string word(std::size_t topic) {
    const double u = uniform();
    if (u < 0.55) return pick(kTopics[topic]);
    if (u < 0.70) return pick(kTopics[(topic + 1) % kTopics.size()]);
    if (u < 0.95) return pick(kGeneric);
    return pick(kRare);
  }

  std::string sentence(std::size_t topic, std::size_t min_len, std::size_t max_len) {
    const std::size_t n = between(min_len, max_len);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = (i % 2 == 1 && uniform() < 0.6) ? pick(kFunction) : word(topic);
      if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      if (!s.empty()) s += ' ';
      s += w;
      if (i + 1 < n && uniform() < 0.05) s += ',';
      if (i + 1 < n && uniform() < 0.03) s += " (n = " + std::to_string(between(10, 900)) + ")";
    }
    return s + '.';
  }

  std::string paragraph(std::size_t topic, std::size_t sentences, std::size_t min_len, std::size_t max_len) {
    std::string p;
    for (std::size_t i = 0; i < sentences; ++i) {
      if (!p.empty()) p += ' ';
      p += sentence(topic, min_len, max_len);
    }
    return p;
  }

  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double uniform() { return std::uniform_real_distribution<double>(0, 1)(rng_); }
  double normal() { return std::normal_distribution<double>(0, 1)(rng_); }

 private:
  const std::string& pick(const std::vector<std::string>& v) { return v[between(0, v.size() - 1)]; }
  std::mt19937_64 rng_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic sample corpus and embeddings"};
  std::string out_dir;
  std::size_t docs = 100, dim = 50;
  std::uint64_t seed = 7;
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--docs", docs)->capture_default_str();
  app.add_option("--dim", dim)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  Writer w(seed);

  std::ofstream articles(out_dir + "/articles.jsonl");
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t topic = d % kTopics.size();
    nlohmann::json j;
    char id[32];
    std::snprintf(id, sizeof id, "sample-%03zu", d);
    j["id"] = id;
    j["title"] = w.sentence(topic, 7, 14);
    j["title"] = j["title"].get<std::string>().substr(0, j["title"].get<std::string>().size() - 1);
    j["abstract"] = w.paragraph(topic, w.between(11, 15), 12, 20);
    std::string body;
    const std::size_t paragraphs = w.between(6, 14);
    for (std::size_t p = 0; p < paragraphs; ++p) {
      if (!body.empty()) body += "\n\n";
      body += w.paragraph((topic + (p % 3 == 2 ? 2 : 0)) % kTopics.size(), w.between(6, 14), 8, 24);
    }
    j["body"] = body;
    articles << j.dump() << '\n';
  }

  // Topic words sit near their topic centre; generic and function words near the origin.
  scisumm::EmbeddingTable table(dim);
  std::vector<std::vector<double>> centres(kTopics.size(), std::vector<double>(dim));
  for (auto& c : centres)
    for (auto& x : c) x = w.normal();
  auto add = [&](const std::string& word, const std::vector<double>* centre, double spread) {
    std::vector<float> v(dim);
    for (std::size_t k = 0; k < dim; ++k)
      v[k] = static_cast<float>((centre ? (*centre)[k] : 0.0) + spread * w.normal());
    table.set(word, v);
  };
  for (std::size_t t = 0; t < kTopics.size(); ++t)
    for (const auto& word : kTopics[t]) add(word, &centres[t], 0.4);
  for (const auto& word : kGeneric) add(word, nullptr, 0.6);
  for (const auto& word : kFunction) add(word, nullptr, 0.3);
  add("#", nullptr, 0.3);
  scisumm::save_embeddings(table, out_dir + "/embeddings.txt", scisumm::EmbeddingFormat::w2v_text);
  std::cerr << "wrote " << docs << " articles and " << table.size() << " embeddings to " << out_dir << '\n';
  return 0;
}
