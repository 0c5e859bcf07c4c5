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

// Shared fixtures: oracle values, scratch directories, small corpora.

#ifndef DPLDA_TESTS_TEST_SUPPORT_HPP_
#define DPLDA_TESTS_TEST_SUPPORT_HPP_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplda/corpus.hpp"
#include "dplda/io.hpp"

namespace dplda::testing {

/// Reference values from tests/oracle/derive_values.py.
inline const nlohmann::json& oracle() {
  static const nlohmann::json values = nlohmann::json::parse(read_file(DPLDA_ORACLE_JSON));
  return values;
}

/// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dplda_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline Corpus parse_uci(const std::string& text) {
  std::istringstream in(text);
  return parse_uci_bag_of_words(in);
}

/// Corpus from explicit token lists over a synthetic vocabulary.
inline Corpus make_corpus(std::size_t vocab_size,
                          const std::vector<std::vector<WordId>>& docs) {
  Corpus c;
  c.vocab = Vocabulary::synthetic(vocab_size);
  for (std::size_t m = 0; m < docs.size(); ++m) {
    c.documents.push_back({static_cast<std::int64_t>(m), docs[m]});
  }
  return c;
}

}  // namespace dplda::testing

#endif  // DPLDA_TESTS_TEST_SUPPORT_HPP_
