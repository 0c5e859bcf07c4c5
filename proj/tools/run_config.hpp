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

// Run configuration: a flat key=value file, overridden by command-line flags.
//
//   # comment
//   docword = data/docword.kos.txt
//   topics  = 50
//   mechanism = monitored-doc

#ifndef DPLDA_TOOLS_RUN_CONFIG_HPP_
#define DPLDA_TOOLS_RUN_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplda/cgs.hpp"
#include "dplda/corpus.hpp"
#include "dplda/error.hpp"
#include "dplda/local_privacy.hpp"

namespace dplda::cli {

/// A configuration value failed validation. field() names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::runtime_error("config field '" + field + "': " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Mechanism { kPlain, kMonitoredWord, kMonitoredDoc, kLocal, kLaplace };

inline std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::kPlain: return "plain";
    case Mechanism::kMonitoredWord: return "monitored-word";
    case Mechanism::kMonitoredDoc: return "monitored-doc";
    case Mechanism::kLocal: return "lp";
    case Mechanism::kLaplace: return "laplace";
  }
  return "?";
}

struct RunConfig {
  std::string docword;
  std::string vocab;
  std::string test;
  std::string test_vocab;
  std::string stopwords;
  std::string model;
  std::string out = "out";

  Hyperparams hyper{50, 0.1, 0.01};
  std::size_t n_iters = 300;
  std::uint64_t seed = 1;
  Mechanism mechanism = Mechanism::kPlain;
  std::optional<double> f;
  std::optional<double> epsilon;
  std::optional<std::size_t> top_v;
  std::size_t n_test = 0;
  std::size_t fold_in_iters = 50;
  bool binary = false;  // train and evaluate on presence-encoded documents

  // sweep
  std::vector<double> values;
  std::string value_kind;  // "f" or "epsilon"; empty picks the mechanism default
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 1;

  nlohmann::json to_json() const {
    nlohmann::json j = {
        {"docword", docword},
        {"vocab", vocab},
        {"test", test},
        {"test_vocab", test_vocab},
        {"stopwords", stopwords},
        {"model", model},
        {"out", out},
        {"topics", hyper.num_topics},
        {"alpha", hyper.alpha},
        {"beta", hyper.beta},
        {"iters", n_iters},
        {"seed", seed},
        {"mechanism", mechanism_name(mechanism)},
        {"n_test", n_test},
        {"fold_in_iters", fold_in_iters},
        {"encoding", binary ? "binary" : "counts"},
    };
    j["f"] = f ? nlohmann::json(*f) : nlohmann::json(nullptr);
    j["epsilon"] = epsilon ? nlohmann::json(*epsilon) : nlohmann::json(nullptr);
    j["top_v"] = top_v ? nlohmann::json(*top_v) : nlohmann::json(nullptr);
    if (!values.empty()) {
      j["values"] = values;
      j["value_kind"] = value_kind;
      j["seeds"] = seeds;
    }
    return j;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) { return dplda::detail::trim(s); }

template <class T>
T parse_number(const std::string& field, std::string_view text) {
  T v{};
  text = trim(text);
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ConfigError(field, "cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& field, std::string_view text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(parse_number<T>(field, item));
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Reads key=value lines. Blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::string> read_config_file(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  for (const auto& raw : dplda::detail::read_lines(path)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    auto key = std::string(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = std::string(detail::trim(line.substr(eq + 1)));
  }
  return kv;
}

/// Applies one key. Unknown keys are rejected.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_number;
  if (key == "docword") c.docword = value;
  else if (key == "vocab") c.vocab = value;
  else if (key == "test") c.test = value;
  else if (key == "test_vocab") c.test_vocab = value;
  else if (key == "stopwords") c.stopwords = value;
  else if (key == "model") c.model = value;
  else if (key == "out") c.out = value;
  else if (key == "topics" || key == "K") c.hyper.num_topics = parse_number<std::size_t>(key, value);
  else if (key == "alpha") c.hyper.alpha = parse_number<double>(key, value);
  else if (key == "beta") c.hyper.beta = parse_number<double>(key, value);
  else if (key == "iters" || key == "n_iters") c.n_iters = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "f") c.f = parse_number<double>(key, value);
  else if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
  else if (key == "top_v") c.top_v = parse_number<std::size_t>(key, value);
  else if (key == "n_test") c.n_test = parse_number<std::size_t>(key, value);
  else if (key == "fold_in_iters") c.fold_in_iters = parse_number<std::size_t>(key, value);
  else if (key == "values") c.values = detail::parse_list<double>(key, value);
  else if (key == "value_kind") c.value_kind = value;
  else if (key == "seeds") c.seeds = detail::parse_list<std::uint64_t>(key, value);
  else if (key == "threads") c.threads = parse_number<std::size_t>(key, value);
  else if (key == "encoding") {
    if (value != "binary" && value != "counts") {
      throw ConfigError(key, "expected 'binary' or 'counts'");
    }
    c.binary = value == "binary";
  }
  else if (key == "mechanism" || key == "level") {
    // resolved together in resolve_mechanism()
  } else {
    throw ConfigError(key, "unknown key");
  }
}

/// mechanism is one of plain, monitored, monitored-word, monitored-doc, lp,
/// laplace. For the monitored family an explicit `level` (word or doc) wins.
inline Mechanism resolve_mechanism(const std::string& mechanism, const std::string& level) {
  if (!level.empty() && level != "word" && level != "doc") {
    throw ConfigError("level", "expected 'word' or 'doc', got '" + level + "'");
  }
  if (mechanism.empty() || mechanism == "plain") return Mechanism::kPlain;
  const bool monitored = mechanism == "monitored" || mechanism == "monitored-word" ||
                         mechanism == "monitored-doc";
  if (monitored && !level.empty()) {
    return level == "doc" ? Mechanism::kMonitoredDoc : Mechanism::kMonitoredWord;
  }
  if (mechanism == "monitored") return Mechanism::kMonitoredWord;
  if (mechanism == "monitored-word") return Mechanism::kMonitoredWord;
  if (mechanism == "monitored-doc") return Mechanism::kMonitoredDoc;
  if (mechanism == "lp") return Mechanism::kLocal;
  if (mechanism == "laplace") return Mechanism::kLaplace;
  throw ConfigError("mechanism", "unknown mechanism '" + mechanism + "'");
}

/// Builds a RunConfig from settings (later maps win).
inline RunConfig build_config(const std::vector<std::map<std::string, std::string>>& layers) {
  RunConfig c;
  std::string mechanism, level;
  for (const auto& layer : layers) {
    for (const auto& [k, v] : layer) {
      apply_setting(c, k, v);
      if (k == "mechanism") mechanism = v;
      if (k == "level") level = v;
    }
  }
  c.mechanism = resolve_mechanism(mechanism, level);
  return c;
}

/// Checks every numeric field against the library's preconditions.
inline void validate(const RunConfig& c) {
  if (c.hyper.num_topics < 1) throw ConfigError("topics", "must be >= 1");
  if (!(c.hyper.alpha > 0.0)) throw ConfigError("alpha", "must be > 0");
  if (!(c.hyper.beta > 0.0)) throw ConfigError("beta", "must be > 0");
  if (c.top_v && *c.top_v < 1) throw ConfigError("top_v", "must be >= 1");
  if (c.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (c.mechanism == Mechanism::kLocal && c.values.empty()) {
    if (c.f.has_value() == c.epsilon.has_value()) {
      throw ConfigError("f", "lp needs exactly one of f or epsilon");
    }
    if (c.f && !(*c.f > 0.0 && *c.f < 1.0)) {
      throw ConfigError("f", "must lie in (0, 1) for lp training");
    }
    if (c.epsilon && !(*c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
  }
  if (c.mechanism == Mechanism::kLaplace && c.values.empty()) {
    if (!c.epsilon) throw ConfigError("epsilon", "laplace needs epsilon");
    if (!(*c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
  }
  if (!c.value_kind.empty() && c.value_kind != "f" && c.value_kind != "epsilon") {
    throw ConfigError("value_kind", "expected 'f' or 'epsilon'");
  }
}

/// Flip configuration for an lp run.
inline FlipConfig flip_config(const RunConfig& c) {
  if (c.f) return FlipConfig::from_flip(*c.f);
  if (c.epsilon) return FlipConfig::from_epsilon(*c.epsilon);
  throw ConfigError("f", "lp needs f or epsilon");
}

}  // namespace dplda::cli

#endif  // DPLDA_TOOLS_RUN_CONFIG_HPP_
