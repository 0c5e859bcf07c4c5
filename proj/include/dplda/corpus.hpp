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

// Corpus representation and UCI bag-of-words ingestion.
//
// A UCI docword file is three header lines (D, V, NNZ) followed by NNZ
// "docID wordID count" triples with 1-based ids. Word names come from a
// sidecar vocabulary file with one word per line; without one, words are
// named "w<id>".

#ifndef DPLDA_CORPUS_HPP_
#define DPLDA_CORPUS_HPP_

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dplda/error.hpp"
#include "dplda/rng.hpp"

namespace dplda {

using WordId = std::uint32_t;

class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i].empty()) {
        throw std::invalid_argument("vocabulary word " + std::to_string(i) +
                                    " is empty");
      }
      if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
        throw std::invalid_argument("duplicate vocabulary word '" + words_[i] +
                                    "'");
      }
    }
  }

  /// Words named "w1".."wV" (1-based, matching the UCI ids).
  static Vocabulary synthetic(std::size_t size) {
    std::vector<std::string> words;
    words.reserve(size);
    for (std::size_t i = 0; i < size; ++i) words.push_back("w" + std::to_string(i + 1));
    return Vocabulary(std::move(words));
  }

  std::size_t size() const { return words_.size(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<WordId> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Document {
  std::int64_t doc_id = 0;
  std::vector<WordId> tokens;
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocab;

  std::size_t num_docs() const { return documents.size(); }
  std::size_t vocab_size() const { return vocab.size(); }

  std::size_t num_tokens() const {
    std::size_t w = 0;
    for (const auto& d : documents) w += d.tokens.size();
    return w;
  }

  std::size_t max_doc_length() const {
    std::size_t n = 0;
    for (const auto& d : documents) n = std::max(n, d.tokens.size());
    return n;
  }

  /// Throws std::invalid_argument if any token id is outside the vocabulary.
  void validate() const {
    const std::size_t v = vocab.size();
    for (const auto& d : documents) {
      for (WordId t : d.tokens) {
        if (t >= v) {
          throw std::invalid_argument("document " + std::to_string(d.doc_id) +
                                      " has token id " + std::to_string(t) +
                                      " outside vocabulary of size " +
                                      std::to_string(v));
        }
      }
    }
  }
};

/// Presence vector of a document over the vocabulary.
struct BinaryDocVector {
  std::int64_t doc_id = 0;
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
  }
  friend bool operator==(const BinaryDocVector&, const BinaryDocVector&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_uint(std::string_view field, std::size_t line,
                                std::string_view what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size()) {
    throw ParseError("expected non-negative integer for " + std::string(what) +
                         ", got '" + std::string(field) + "'",
                     line);
  }
  return v;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace detail

/// One word per line; blank lines are ignored.
inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::vector<std::string> words;
  for (const auto& line : detail::read_lines(path)) {
    auto w = detail::trim(line);
    if (!w.empty()) words.emplace_back(w);
  }
  return words;
}

inline std::unordered_set<std::string> load_stopwords(
    const std::filesystem::path& path) {
  auto words = load_word_list(path);
  return {words.begin(), words.end()};
}

/// Conventional sidecar location: "docword.kos.txt" -> "docword.kos.vocab",
/// falling back to "<path>.vocab".
inline std::optional<std::filesystem::path> find_vocab_sidecar(
    const std::filesystem::path& docword) {
  auto replaced = docword;
  replaced.replace_extension(".vocab");
  if (std::filesystem::exists(replaced)) return replaced;
  auto appended = docword;
  appended += ".vocab";
  if (std::filesystem::exists(appended)) return appended;
  return std::nullopt;
}

/// Parses a UCI docword stream. Each triple contributes `count` repetitions
/// of its word to its document, in file order.
inline Corpus parse_uci_bag_of_words(std::istream& in,
                                     std::optional<Vocabulary> vocab = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t header[3];
  const char* names[3] = {"document count", "vocabulary size", "nonzero count"};
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of file in header", line_no + 1);
    }
    ++line_no;
    auto fields = detail::split_ws(line);
    if (fields.size() != 1) {
      throw ParseError(std::string("expected a single ") + names[i], line_no);
    }
    header[i] = detail::parse_uint(fields[0], line_no, names[i]);
  }
  const std::uint64_t n_docs = header[0];
  const std::uint64_t n_words = header[1];
  const std::uint64_t nnz = header[2];

  Corpus corpus;
  if (vocab) {
    if (vocab->size() != n_words) {
      throw ParseError("vocabulary file has " + std::to_string(vocab->size()) +
                           " words but header declares " +
                           std::to_string(n_words),
                       2);
    }
    corpus.vocab = std::move(*vocab);
  } else {
    corpus.vocab = Vocabulary::synthetic(n_words);
  }
  corpus.documents.resize(n_docs);
  for (std::uint64_t m = 0; m < n_docs; ++m) {
    corpus.documents[m].doc_id = static_cast<std::int64_t>(m);
  }

  std::uint64_t seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(nnz) + " triples, found " +
                           std::to_string(seen),
                       line_no + 1);
    }
    ++line_no;
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw ParseError("expected 'docID wordID count'", line_no);
    }
    auto doc = detail::parse_uint(fields[0], line_no, "docID");
    auto word = detail::parse_uint(fields[1], line_no, "wordID");
    auto count = detail::parse_uint(fields[2], line_no, "count");
    if (doc == 0 || doc > n_docs) {
      throw std::out_of_range("line " + std::to_string(line_no) + ": docID " +
                              std::to_string(doc) + " outside [1, " +
                              std::to_string(n_docs) + "]");
    }
    if (word == 0 || word > n_words) {
      throw std::out_of_range("line " + std::to_string(line_no) + ": wordID " +
                              std::to_string(word) + " outside [1, " +
                              std::to_string(n_words) + "]");
    }
    auto& tokens = corpus.documents[doc - 1].tokens;
    tokens.insert(tokens.end(), count, static_cast<WordId>(word - 1));
    ++seen;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      throw ParseError("trailing data after " + std::to_string(nnz) + " triples",
                       line_no);
    }
  }
  return corpus;
}

inline Corpus load_uci_bag_of_words(
    const std::filesystem::path& path,
    std::optional<std::filesystem::path> vocab_path = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (!vocab_path) vocab_path = find_vocab_sidecar(path);
  std::optional<Vocabulary> vocab;
  if (vocab_path) vocab = Vocabulary(load_word_list(*vocab_path));
  return parse_uci_bag_of_words(in, std::move(vocab));
}

/// Writes `corpus` in UCI format with triples sorted by (doc, word).
inline void write_uci_bag_of_words(const Corpus& corpus, std::ostream& out) {
  std::vector<std::map<WordId, std::uint64_t>> counts(corpus.num_docs());
  std::size_t nnz = 0;
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    for (WordId t : corpus.documents[m].tokens) ++counts[m][t];
    nnz += counts[m].size();
  }
  out << corpus.num_docs() << '\n' << corpus.vocab_size() << '\n' << nnz << '\n';
  for (std::size_t m = 0; m < counts.size(); ++m) {
    for (auto [t, c] : counts[m]) out << m + 1 << ' ' << t + 1 << ' ' << c << '\n';
  }
}

inline void save_uci_bag_of_words(const Corpus& corpus,
                                  const std::filesystem::path& docword,
                                  const std::filesystem::path& vocab) {
  std::ofstream out(docword);
  if (!out) throw IoError("cannot write " + docword.string());
  write_uci_bag_of_words(corpus, out);
  std::ofstream vout(vocab);
  if (!vout) throw IoError("cannot write " + vocab.string());
  for (const auto& w : corpus.vocab.words()) vout << w << '\n';
}

/// Keeps the `top_v` most frequent non-stopword types (ties broken by
/// lexicographically smaller word) and re-indexes them densely in their
/// original relative order. Types that never occur are dropped. Documents
/// that lose all tokens are kept.
inline Corpus preprocess(const Corpus& corpus,
                         const std::unordered_set<std::string>& stopwords,
                         std::size_t top_v) {
  if (top_v == 0) throw std::invalid_argument("top_v must be >= 1");
  corpus.validate();
  const std::size_t v = corpus.vocab_size();
  std::vector<std::uint64_t> freq(v, 0);
  for (const auto& d : corpus.documents) {
    for (WordId t : d.tokens) ++freq[t];
  }
  std::vector<WordId> candidates;
  for (WordId t = 0; t < v; ++t) {
    if (freq[t] > 0 && !stopwords.contains(corpus.vocab.word(t))) {
      candidates.push_back(t);
    }
  }
  if (top_v > candidates.size()) {
    detail::warn("top_v=" + std::to_string(top_v) + " exceeds the " +
                 std::to_string(candidates.size()) +
                 " distinct retained types; keeping all");
  } else {
    std::sort(candidates.begin(), candidates.end(), [&](WordId a, WordId b) {
      if (freq[a] != freq[b]) return freq[a] > freq[b];
      return corpus.vocab.word(a) < corpus.vocab.word(b);
    });
    candidates.resize(top_v);
    std::sort(candidates.begin(), candidates.end());
  }
  if (candidates.empty()) {
    throw std::invalid_argument("preprocessing removed every vocabulary type");
  }

  constexpr WordId kDropped = static_cast<WordId>(-1);
  std::vector<WordId> remap(v, kDropped);
  std::vector<std::string> words;
  words.reserve(candidates.size());
  for (WordId t : candidates) {
    remap[t] = static_cast<WordId>(words.size());
    words.push_back(corpus.vocab.word(t));
  }

  Corpus out;
  out.vocab = Vocabulary(std::move(words));
  out.documents.reserve(corpus.num_docs());
  for (const auto& d : corpus.documents) {
    Document nd{d.doc_id, {}};
    for (WordId t : d.tokens) {
      if (remap[t] != kDropped) nd.tokens.push_back(remap[t]);
    }
    out.documents.push_back(std::move(nd));
  }
  return out;
}

/// Re-expresses `corpus` over `vocab` by word name; tokens whose word is not
/// in `vocab` are dropped.
inline Corpus restrict_to_vocabulary(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::optional<WordId>> remap(corpus.vocab_size());
  for (WordId t = 0; t < corpus.vocab_size(); ++t) {
    remap[t] = vocab.find(corpus.vocab.word(t));
  }
  Corpus out;
  out.vocab = vocab;
  out.documents.reserve(corpus.num_docs());
  for (const auto& d : corpus.documents) {
    Document nd{d.doc_id, {}};
    for (WordId t : d.tokens) {
      if (remap.at(t)) nd.tokens.push_back(*remap[t]);
    }
    out.documents.push_back(std::move(nd));
  }
  return out;
}

/// Random document split. Both halves keep the original document order and
/// share the vocabulary. Returns (train, test).
inline std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus,
                                                  std::size_t n_test,
                                                  std::uint64_t seed) {
  if (n_test > corpus.num_docs()) {
    throw std::invalid_argument("n_test=" + std::to_string(n_test) +
                                " exceeds document count " +
                                std::to_string(corpus.num_docs()));
  }
  std::vector<std::size_t> order(corpus.num_docs());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "corpus.split"));
  // Partial Fisher-Yates: the first n_test slots become the test set.
  for (std::size_t i = 0; i < n_test; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<bool> is_test(corpus.num_docs(), false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  Corpus train, test;
  train.vocab = corpus.vocab;
  test.vocab = corpus.vocab;
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    (is_test[m] ? test : train).documents.push_back(corpus.documents[m]);
  }
  return {std::move(train), std::move(test)};
}

inline BinaryDocVector encode_binary(const Document& doc, std::size_t vocab_size) {
  BinaryDocVector v{doc.doc_id, std::vector<std::uint8_t>(vocab_size, 0)};
  for (WordId t : doc.tokens) v.bits.at(t) = 1;
  return v;
}

/// Corpus in which every document holds each of its distinct words once.
inline Corpus binarize(const Corpus& corpus) {
  Corpus out;
  out.vocab = corpus.vocab;
  out.documents.reserve(corpus.num_docs());
  for (const auto& d : corpus.documents) {
    auto bits = encode_binary(d, corpus.vocab_size());
    Document nd{d.doc_id, {}};
    for (WordId t = 0; t < bits.size(); ++t) {
      if (bits.bits[t]) nd.tokens.push_back(t);
    }
    out.documents.push_back(std::move(nd));
  }
  return out;
}

}  // namespace dplda

#endif  // DPLDA_CORPUS_HPP_
