#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

#include "clear/corpus.hpp"
#include "test_util.hpp"

namespace clear {
namespace {

using testing::TempDir;
using testing::write_file;

constexpr const char* kTwoPairs =
    R"({"id": "a1", "language": "en", "topic": "t", "original": "Hi. Bye.", "improved": "Hello."})"
    "\n"
    R"({"id": "a2", "language": "de", "topic": "", "original": "Hallo Welt.", "improved": ""})"
    "\n";

TEST(LoadPairs, ParsesRecordsInOrder) {
  TempDir dir;
  write_file(dir / "pairs.jsonl", kTwoPairs);
  auto corpus = load_pairs(dir / "pairs.jsonl");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].id, "a1");
  EXPECT_EQ(corpus[0].language, Language::en);
  EXPECT_EQ(corpus[1].language, Language::de);
  EXPECT_EQ(corpus[1].improved, "");
}

TEST(LoadPairs, EmptyFile) {
  TempDir dir;
  write_file(dir / "pairs.jsonl", "");
  EXPECT_TRUE(load_pairs(dir / "pairs.jsonl").empty());
}

TEST(LoadPairs, MissingFieldNamesLine) {
  std::istringstream in(std::string(kTwoPairs) + R"({"id": "a3", "language": "en", "improved": "x"})" + "\n");
  try {
    parse_pairs(in, "pairs.jsonl");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("pairs.jsonl:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("original"), std::string::npos) << msg;
  }
}

TEST(LoadPairs, DuplicateIdNamesId) {
  std::istringstream in(std::string(kTwoPairs) +
                        R"({"id": "a1", "language": "en", "original": "x", "improved": "y"})" + "\n");
  try {
    parse_pairs(in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'a1'"), std::string::npos);
  }
}

TEST(LoadPairs, RejectsBadLanguageAndJson) {
  std::istringstream bad_lang(R"({"id": "x", "language": "fr", "original": "a", "improved": "b"})");
  EXPECT_THROW(parse_pairs(bad_lang), ParseError);
  std::istringstream bad_json("{not json}\n");
  EXPECT_THROW(parse_pairs(bad_json), ParseError);
  std::istringstream empty_original(R"({"id": "x", "language": "en", "original": "", "improved": "b"})");
  EXPECT_THROW(parse_pairs(empty_original), ParseError);
}

TEST(LoadPairs, MissingFileIsIoError) { EXPECT_THROW(load_pairs("/nonexistent/pairs.jsonl"), IoError); }

TEST(LoadPairs, SerializeRoundTrip) {
  std::mt19937 rng(12);
  const std::vector<std::string> bits{"a", "Ü", "\"", "\\", "\n", " ", "é", "😀", ".", "\t"};
  for (int round = 0; round < 100; ++round) {
    Corpus corpus;
    int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      DocumentPair p;
      p.id = "id" + std::to_string(i);
      p.language = rng() % 2 ? Language::en : Language::de;
      for (int k = 0, len = static_cast<int>(rng() % 5); k < len; ++k) p.topic += bits[rng() % bits.size()];
      p.original = "x";
      for (int k = 0, len = static_cast<int>(rng() % 20); k < len; ++k) p.original += bits[rng() % bits.size()];
      for (int k = 0, len = static_cast<int>(rng() % 20); k < len; ++k) p.improved += bits[rng() % bits.size()];
      corpus.push_back(p);
    }
    std::istringstream in(serialize_pairs(corpus));
    auto back = parse_pairs(in);
    ASSERT_EQ(back.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ASSERT_EQ(back[i].id, corpus[i].id);
      ASSERT_EQ(back[i].language, corpus[i].language);
      ASSERT_EQ(back[i].topic, corpus[i].topic);
      ASSERT_EQ(back[i].original, corpus[i].original);
      ASSERT_EQ(back[i].improved, corpus[i].improved);
    }
  }
}

constexpr const char* kBundle = R"({
  "pair_id": "a1", "side": "original",
  "sentences": [[0, 3], [4, 8]],
  "tokens": [
    [{"surface": "Hi", "dep": "ROOT", "head": -1, "pos": "INTJ"}, {"surface": ".", "dep": "punct", "head": 0, "pos": "PUNCT"}],
    [{"surface": "Bye", "dep": "ROOT", "head": -1, "pos": "INTJ"}, {"surface": ".", "dep": "punct", "head": 0, "pos": "PUNCT"}]
  ],
  "embeddings": [[1.0, 0.0], [0.0, 1.0]],
  "sentiment_en": {"polarity": 0.1, "subjectivity": 0.4},
  "components": ["Claim", "None"],
  "external_scores": {"gruen": 0.82}
})";

TEST(LoadAnnotations, ValidBundle) {
  TempDir dir;
  write_file(dir / "a1.original.json", kBundle);
  auto b = load_annotations(dir.path(), "a1", Side::original, 8);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->sentences.size(), 2u);
  EXPECT_EQ(b->tokens.size(), b->sentences.size());
  EXPECT_TRUE(b->has_dependencies());
  EXPECT_DOUBLE_EQ(b->external_scores.at("gruen"), 0.82);
}

TEST(LoadAnnotations, MissingFileIsAbsent) {
  TempDir dir;
  EXPECT_FALSE(load_annotations(dir.path(), "a1", Side::improved));
}

TEST(LoadAnnotations, MixedEmbeddingDimensions) {
  TempDir dir;
  auto j = nlohmann::json::parse(kBundle);
  j["embeddings"] = {{1.0, 0.0}, {1.0}};
  write_file(dir / "a1.original.json", j.dump());
  try {
    load_annotations(dir.path(), "a1", Side::original);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mixed dimensions"), std::string::npos);
  }
}

TEST(LoadAnnotations, InvariantViolations) {
  TempDir dir;
  auto check = [&](nlohmann::json j, const std::string& expected, std::optional<std::size_t> len = std::nullopt) {
    write_file(dir / "a1.original.json", j.dump());
    try {
      load_annotations(dir.path(), "a1", Side::original, len);
      ADD_FAILURE() << "expected ValidationError mentioning " << expected;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(expected), std::string::npos) << e.what();
    }
  };
  auto base = nlohmann::json::parse(kBundle);
  auto overlap = base;
  overlap["sentences"] = {{0, 5}, {4, 8}};
  check(overlap, "overlaps");
  check(base, "exceeds text length", 6);
  auto bad_head = base;
  bad_head["tokens"][0][1]["head"] = 7;
  check(bad_head, "head index");
  auto bad_de = base;
  bad_de["sentiment_de"] = {{"p_pos", 0.5}, {"p_neg", 0.5}, {"p_neu", 0.5}};
  check(bad_de, "sum to 1");
  auto too_few_tokens = base;
  too_few_tokens["tokens"].erase(1);
  check(too_few_tokens, "token lists");
  auto wrong_side = base;
  wrong_side["side"] = "improved";
  check(wrong_side, "side does not match");
}

TEST(LoadAnnotations, MalformedJsonIsParseError) {
  TempDir dir;
  write_file(dir / "a1.original.json", "{");
  EXPECT_THROW(load_annotations(dir.path(), "a1", Side::original), ParseError);
  write_file(dir / "a1.original.json", R"({"pair_id": "a1", "side": "original"})");
  EXPECT_THROW(load_annotations(dir.path(), "a1", Side::original), ParseError);
}

TEST(LoadAnnotations, BundleJsonRoundTrip) {
  auto b = bundle_from_json(nlohmann::json::parse(kBundle));
  auto again = bundle_from_json(nlohmann::json::parse(bundle_to_json(b).dump()));
  EXPECT_EQ(bundle_to_json(again).dump(), bundle_to_json(b).dump());
}

TEST(LoadAnnotations, CodePointSpansMapToBytes) {
  AnnotationBundle b;
  b.sentences = {{0, 5}, {6, 10}};
  std::string text = "Über. Ärgr";
  auto spans = b.byte_spans(text);
  EXPECT_EQ(spans[0].slice(text), "Über.");
  EXPECT_EQ(spans[1].slice(text), "Ärgr");
}

TEST(DatasetStats, SingleDocument) {
  Corpus corpus{{"d", Language::en, "", "Hi. Bye.", ""}};
  auto s = dataset_stats(corpus, Side::original);
  EXPECT_EQ(s.doc_count, 1);
  EXPECT_DOUBLE_EQ(s.avg_sentence_count, 2.0);
  EXPECT_DOUBLE_EQ(s.avg_length_chars, 8.0);
  EXPECT_DOUBLE_EQ(s.avg_sentence_length_chars, 3.5);
  EXPECT_DOUBLE_EQ(s.avg_words_per_sentence, 1.0);
}

TEST(DatasetStats, IdenticalDocumentsEqualSingle) {
  std::string text = "Llama 3.1 is big. It is, e.g., slow!  Fine.\n\n";
  Corpus one{{"x", Language::en, "", text, text}};
  Corpus many;
  for (int i = 0; i < 7; ++i) many.push_back({"x" + std::to_string(i), Language::en, "", text, text});
  auto a = dataset_stats(one, Side::original);
  auto b = dataset_stats(many, Side::original);
  EXPECT_DOUBLE_EQ(a.avg_length_chars, b.avg_length_chars);
  EXPECT_DOUBLE_EQ(a.avg_sentence_count, b.avg_sentence_count);
  EXPECT_DOUBLE_EQ(a.avg_sentence_length_chars, b.avg_sentence_length_chars);
  EXPECT_DOUBLE_EQ(a.avg_words_per_sentence, b.avg_words_per_sentence);
  EXPECT_EQ(b.doc_count, 7);
}

TEST(DatasetStats, EmptyCorpusIsError) { EXPECT_THROW(dataset_stats({}, Side::original), InsufficientDataError); }

TEST(DatasetStats, TrailingWhitespaceExcluded) {
  Corpus corpus{{"d", Language::de, "", "  Grüße.  \n", ""}};
  EXPECT_DOUBLE_EQ(dataset_stats(corpus, Side::original).avg_length_chars, 8.0);  // leading spaces count
}

}  // namespace
}  // namespace clear
