#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace scisumm;
using namespace testing_support;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto p = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream(p) << contents;
  return p;
}

std::string n_words(std::size_t n, const std::string& w = "tok") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + w;
  return s;
}

ArticleRecord record(std::size_t abstract, std::size_t title, std::size_t body) {
  return {"r", n_words(title, "t"), n_words(abstract, "a"), n_words(body, "b")};
}

}  // namespace

TEST(Records, ReadValid) {
  const auto p = temp_file("rec3.jsonl",
                           R"({"id":"1","title":"T one","abstract":"A one."}
{"id":"2","title":"T two","abstract":"A two.","body":"B."}

{"id":3,"title":"T three","abstract":"A three."}
)");
  const auto recs = read_records(p);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].id, "1");
  EXPECT_EQ(recs[1].body, "B.");
  EXPECT_EQ(recs[2].id, "3");
}

TEST(Records, MalformedLinesSkippedWithWarning) {
  const auto p = temp_file("recbad.jsonl",
                           R"({"id":"1","title":"T","abstract":"A"}
{"id":"2","title":"T"}
not json
{"id":"1","title":"dup","abstract":"dup"}
{"id":"4","title":"T","abstract":"A"}
)");
  std::vector<std::string> warnings;
  auto previous = log::set_sink([&](std::string_view level, std::string_view msg) {
    if (level == "warn") warnings.emplace_back(msg);
  });
  RecordReader reader(p);
  std::vector<std::string> ids;
  while (auto r = reader.next()) ids.push_back(r->id);
  log::set_sink(previous);
  EXPECT_EQ(ids, (std::vector<std::string>{"1", "4"}));
  EXPECT_EQ(reader.skipped(), 3u);
  ASSERT_EQ(warnings.size(), 3u);
  EXPECT_NE(warnings[0].find(":2:"), std::string::npos);
  EXPECT_NE(warnings[0].find("abstract"), std::string::npos);
  EXPECT_NE(warnings[2].find("duplicate"), std::string::npos);
}

TEST(Records, EmptyFileAndMissingFile) {
  EXPECT_TRUE(read_records(temp_file("empty.jsonl", "")).empty());
  EXPECT_THROW(read_records("/nonexistent/records.jsonl"), DataError);
}

TEST(Filter, Examples) {
  auto reason = [](const FilterResult& r) { return std::get<RejectReason>(r); };
  EXPECT_EQ(reason(filter_pair(record(149, 10, 1000), Task::title_gen)), RejectReason::abstract_too_short);
  EXPECT_TRUE(std::holds_alternative<PairExample>(filter_pair(record(150, 6, 700), Task::title_gen)));
  EXPECT_TRUE(std::holds_alternative<PairExample>(filter_pair(record(150, 6, 700), Task::abstract_gen)));
  EXPECT_EQ(reason(filter_pair(record(200, 10, 10001), Task::abstract_gen)), RejectReason::body_too_long);
  // body is irrelevant for title-gen
  EXPECT_TRUE(std::holds_alternative<PairExample>(filter_pair(record(200, 10, 10001), Task::title_gen)));
}

TEST(Filter, BoundariesExhaustive) {
  const LengthBounds b;
  const std::size_t as[] = {b.abstract_min - 1, b.abstract_min, b.abstract_max, b.abstract_max + 1};
  const std::size_t ts[] = {b.title_min - 1, b.title_min, b.title_max, b.title_max + 1};
  const std::size_t bs[] = {b.body_min - 1, b.body_min, b.body_max, b.body_max + 1};
  for (auto a : as)
    for (auto t : ts)
      for (auto n : bs)
        for (auto task : {Task::title_gen, Task::abstract_gen}) {
          std::optional<std::string> want;
          if (a < 150) want = "abstract_too_short";
          else if (a > 370) want = "abstract_too_long";
          else if (t < 6) want = "title_too_short";
          else if (t > 25) want = "title_too_long";
          else if (task == Task::abstract_gen && n < 700) want = "body_too_short";
          else if (task == Task::abstract_gen && n > 10000) want = "body_too_long";
          const auto got = filter_pair(record(a, t, n), task);
          if (want) {
            ASSERT_TRUE(std::holds_alternative<RejectReason>(got));
            EXPECT_EQ(to_string(std::get<RejectReason>(got)), *want);
          } else {
            ASSERT_TRUE(std::holds_alternative<PairExample>(got));
          }
        }
}

TEST(Filter, PairShapes) {
  ArticleRecord r{"x", "A title. With two parts", n_words(160, "a") + ".", n_words(800, "b") + "."};
  const auto t = std::get<PairExample>(filter_pair(r, Task::title_gen));
  EXPECT_EQ(t.target.size(), 1u);  // title merged into one sentence
  EXPECT_EQ(t.source.token_count(), 161u);
  const auto a = std::get<PairExample>(filter_pair(r, Task::abstract_gen));
  EXPECT_EQ(a.source.token_count(), 801u);
  EXPECT_EQ(a.target.token_count(), 161u);
}

TEST(Pairs, JsonRoundTrip) {
  PairExample p{"id7", doc("First sentence here. Second one (really)!"), doc("A title"), Task::abstract_gen};
  const auto back = pair_from_json(to_json(p));
  EXPECT_EQ(back.id, p.id);
  EXPECT_EQ(back.task, p.task);
  ASSERT_EQ(back.source.size(), 2u);
  EXPECT_EQ(to_segmented(back.source), to_segmented(p.source));
  EXPECT_EQ(to_segmented(back.target), to_segmented(p.target));
}

TEST(Stats, IdenticalPairsHaveZeroStd) {
  const PairExample p{"a", doc("cells grew fast. mice slept."), doc("cells grew."), Task::title_gen};
  const std::vector<PairExample> v = {p, p};
  const auto s = corpus_stats(v);
  EXPECT_EQ(s.examples, 2u);
  EXPECT_EQ(s.source_tokens.stddev(), 0.0);
  EXPECT_EQ(s.overlap.stddev(), 0.0);
  EXPECT_EQ(s.target_tokens.mean(), 3.0);
  EXPECT_EQ(s.source_sentences.mean(), 2.0);
  EXPECT_EQ(s.overlap.mean(), 1.0);
  EXPECT_THROW(corpus_stats(std::vector<PairExample>{}), DataError);
}

TEST(Stats, MergeMatchesSequential) {
  const PairExample p{"a", doc("cells grew fast. mice slept."), doc("cells grew."), Task::title_gen};
  const PairExample q{"b", doc("one two three four. five six."), doc("seven."), Task::title_gen};
  CorpusStats x, y, all;
  x.add(p);
  y.add(q);
  all.add(p);
  all.add(q);
  x.merge(y);
  EXPECT_EQ(to_json(x).dump(), to_json(all).dump());
}

TEST(Split, DeterministicAndSized) {
  std::vector<PairExample> pairs;
  for (int i = 0; i < 1000; ++i) pairs.push_back({"record-" + std::to_string(i), {}, {}, Task::title_gen});
  const auto a = split_dataset(pairs, 42, {});
  const auto b = split_dataset(pairs, 42, {});
  ASSERT_EQ(a.train.size(), b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].id, b.train[i].id);
  // within 3% of the record count
  EXPECT_NEAR(static_cast<double>(a.train.size()), 800, 30);
  EXPECT_NEAR(static_cast<double>(a.valid.size()), 100, 30);
  EXPECT_NEAR(static_cast<double>(a.test.size()), 100, 30);
  EXPECT_EQ(a.train.size() + a.valid.size() + a.test.size(), 1000u);

  const auto all_train = split_dataset(pairs, 1, {1.0, 0.0, 0.0});
  EXPECT_EQ(all_train.train.size(), 1000u);
  EXPECT_THROW(split_dataset(pairs, 1, {0.5, 0.5, 0.5}), UsageError);

  // another seed gives another partition
  std::size_t same = 0;
  for (const auto& p : pairs) same += assign_split(p.id, 42, {}) == assign_split(p.id, 43, {});
  EXPECT_LT(same, 1000u);
}
