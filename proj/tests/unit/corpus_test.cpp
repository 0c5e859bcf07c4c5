// Copyright 2026 The dplda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "dplda/corpus.hpp"
#include "dplda/rng.hpp"
#include "test_support.hpp"

namespace dplda {
namespace {

using testing::make_corpus;
using testing::parse_uci;
using testing::ScratchDir;

std::map<WordId, int> histogram(const Document& d) {
  std::map<WordId, int> h;
  for (WordId t : d.tokens) ++h[t];
  return h;
}

TEST(UciParse, TriplesExpandToTokens) {
  const Corpus c = parse_uci("2\n3\n3\n1 1 2\n1 3 1\n2 2 1\n");
  EXPECT_EQ(c.num_docs(), 2u);
  EXPECT_EQ(c.num_tokens(), 4u);
  EXPECT_EQ(c.max_doc_length(), 3u);
  EXPECT_EQ(c.documents[0].tokens, (std::vector<WordId>{0, 0, 2}));
  EXPECT_EQ(c.documents[1].tokens, (std::vector<WordId>{1}));
  EXPECT_EQ(c.vocab.word(2), "w3");
}

TEST(UciParse, EmptyTripleSection) {
  const Corpus c = parse_uci("1\n5\n0\n");
  ASSERT_EQ(c.num_docs(), 1u);
  EXPECT_TRUE(c.documents[0].tokens.empty());
  EXPECT_EQ(c.num_tokens(), 0u);
}

TEST(UciParse, MalformedHeaderReportsLine) {
  try {
    parse_uci("2\nabc\n1\n1 1 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(UciParse, ShortTripleReportsLine) {
  try {
    parse_uci("1\n3\n2\n1 1 1\n1 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(UciParse, WordIdBeyondVocabularyIsRangeError) {
  EXPECT_THROW(parse_uci("1\n3\n1\n1 4 1\n"), std::out_of_range);
  EXPECT_THROW(parse_uci("1\n3\n1\n2 1 1\n"), std::out_of_range);
}

TEST(UciParse, MissingTriples) {
  EXPECT_THROW(parse_uci("1\n3\n2\n1 1 1\n"), ParseError);
}

TEST(UciParse, VocabularySizeMustMatch) {
  std::istringstream in("1\n3\n1\n1 1 1\n");
  EXPECT_THROW(parse_uci_bag_of_words(in, Vocabulary({"a", "b"})), ParseError);
}

TEST(UciLoad, SidecarVocabularyAndMissingFile) {
  ScratchDir dir("uci");
  const auto docword = dir.write("docword.toy.txt", "1\n2\n2\n1 1 1\n1 2 3\n");
  dir.write("docword.toy.vocab", "apple\nbanana\n");
  const Corpus c = load_uci_bag_of_words(docword);
  EXPECT_EQ(c.vocab.word(1), "banana");
  EXPECT_EQ(c.num_tokens(), 4u);
  EXPECT_THROW(load_uci_bag_of_words(dir / "absent.txt"), IoError);
}

TEST(UciLoad, RoundTripPreservesTokenCounts) {
  Rng rng(derive_seed(11, "test.roundtrip"));
  ScratchDir dir("roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t v = 1 + rng() % 12;
    std::vector<std::vector<WordId>> docs(rng() % 8);
    for (auto& d : docs) {
      d.resize(rng() % 15);
      for (auto& t : d) t = static_cast<WordId>(rng() % v);
    }
    const Corpus original = make_corpus(v, docs);
    save_uci_bag_of_words(original, dir / "d.txt", dir / "d.vocab");
    const Corpus loaded = load_uci_bag_of_words(dir / "d.txt");
    ASSERT_EQ(loaded.num_docs(), original.num_docs());
    EXPECT_EQ(loaded.vocab, original.vocab);
    for (std::size_t m = 0; m < original.num_docs(); ++m) {
      EXPECT_EQ(histogram(loaded.documents[m]), histogram(original.documents[m]));
    }
  }
}

TEST(Vocabulary, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(Vocabulary({"a", "a"}), std::invalid_argument);
  EXPECT_THROW(Vocabulary({"a", ""}), std::invalid_argument);
  Vocabulary v({"x", "y"});
  EXPECT_EQ(v.find("y"), std::optional<WordId>(1));
  EXPECT_FALSE(v.find("z"));
}

TEST(Preprocess, TopVByFrequency) {
  Corpus c;
  c.vocab = Vocabulary({"a", "b", "c"});
  c.documents = {{0, {0, 0, 0, 1, 2}}, {1, {0, 0, 1, 1}}};
  set_warnings_enabled(false);
  const Corpus out = preprocess(c, {}, 2);
  set_warnings_enabled(true);
  EXPECT_EQ(out.vocab.words(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(out.documents[0].tokens, (std::vector<WordId>{0, 0, 0, 1}));
}

TEST(Preprocess, TieAtCutoffPrefersSmallerWord) {
  Corpus c;
  c.vocab = Vocabulary({"pear", "fig", "kiwi"});
  c.documents = {{0, {0, 1, 2, 2}}};
  const Corpus out = preprocess(c, {}, 2);
  // kiwi leads; fig and pear tie at one occurrence and fig sorts first.
  EXPECT_EQ(out.vocab.words(), (std::vector<std::string>{"fig", "kiwi"}));
}

TEST(Preprocess, IdentityUpToRelabeling) {
  const Corpus c = make_corpus(4, {{3, 1, 1}, {0, 2}, {}});
  const Corpus out = preprocess(c, {}, 4);
  ASSERT_EQ(out.vocab, c.vocab);
  for (std::size_t m = 0; m < c.num_docs(); ++m) {
    EXPECT_EQ(out.documents[m].tokens, c.documents[m].tokens);
  }
}

TEST(Preprocess, StopwordsAndEmptyDocumentsKept) {
  Corpus c;
  c.vocab = Vocabulary({"the", "cat", "sat"});
  c.documents = {{0, {0, 0}}, {1, {1, 2, 0}}};
  const Corpus out = preprocess(c, {"the"}, 10);
  ASSERT_EQ(out.num_docs(), 2u);
  EXPECT_TRUE(out.documents[0].tokens.empty());
  EXPECT_EQ(out.vocab.words(), (std::vector<std::string>{"cat", "sat"}));
  EXPECT_THROW(preprocess(c, {}, 0), std::invalid_argument);
}

TEST(Preprocess, NeverGrowsCorpus) {
  Rng rng(derive_seed(3, "test.preprocess"));
  set_warnings_enabled(false);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t v = 2 + rng() % 10;
    std::vector<std::vector<WordId>> docs(1 + rng() % 6);
    for (auto& d : docs) {
      d.resize(1 + rng() % 10);
      for (auto& t : d) t = static_cast<WordId>(rng() % v);
    }
    const Corpus c = make_corpus(v, docs);
    const Corpus out = preprocess(c, {}, 1 + rng() % v);
    EXPECT_LE(out.num_tokens(), c.num_tokens());
    EXPECT_EQ(out.num_docs(), c.num_docs());
    EXPECT_LE(out.vocab_size(), c.vocab_size());
  }
  set_warnings_enabled(true);
}

TEST(Split, DeterministicDisjointAndComplete) {
  std::vector<std::vector<WordId>> docs(20);
  for (std::size_t m = 0; m < docs.size(); ++m) docs[m] = {static_cast<WordId>(m % 5)};
  const Corpus c = make_corpus(5, docs);
  const auto [train_a, test_a] = split_train_test(c, 7, 42);
  const auto [train_b, test_b] = split_train_test(c, 7, 42);
  EXPECT_EQ(test_a.num_docs(), 7u);
  EXPECT_EQ(train_a.num_docs(), 13u);
  std::vector<std::int64_t> ids;
  for (const auto& d : train_a.documents) ids.push_back(d.doc_id);
  for (const auto& d : test_a.documents) ids.push_back(d.doc_id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t m = 0; m < ids.size(); ++m) EXPECT_EQ(ids[m], static_cast<std::int64_t>(m));
  for (std::size_t i = 0; i < test_a.num_docs(); ++i) {
    EXPECT_EQ(test_a.documents[i].doc_id, test_b.documents[i].doc_id);
  }
  EXPECT_EQ(train_a.vocab, c.vocab);
  EXPECT_EQ(test_a.vocab, c.vocab);
}

TEST(Split, ZeroAndTooMany) {
  const Corpus c = make_corpus(2, {{0}, {1}});
  const auto [train, test] = split_train_test(c, 0, 1);
  EXPECT_EQ(train.num_docs(), 2u);
  EXPECT_EQ(test.num_docs(), 0u);
  EXPECT_THROW(split_train_test(c, 3, 1), std::invalid_argument);
}

TEST(EncodeBinary, Examples) {
  EXPECT_EQ(encode_binary({0, {0, 0, 2}}, 3).bits, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(encode_binary({0, {}}, 3).bits, (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(encode_binary({0, {1}}, 3).bits, (std::vector<std::uint8_t>{0, 1, 0}));
}

TEST(EncodeBinary, RepetitionDoesNotChangeOutput) {
  Rng rng(derive_seed(5, "test.binary"));
  for (int trial = 0; trial < 50; ++trial) {
    Document d{0, {}};
    for (int i = 0; i < 6; ++i) d.tokens.push_back(static_cast<WordId>(rng() % 8));
    Document doubled = d;
    doubled.tokens.insert(doubled.tokens.end(), d.tokens.begin(), d.tokens.end());
    EXPECT_EQ(encode_binary(d, 8), encode_binary(doubled, 8));
  }
}

TEST(Binarize, KeepsOnePerType) {
  const Corpus c = binarize(make_corpus(3, {{2, 0, 2, 2}}));
  EXPECT_EQ(c.documents[0].tokens, (std::vector<WordId>{0, 2}));
}

}  // namespace
}  // namespace dplda
