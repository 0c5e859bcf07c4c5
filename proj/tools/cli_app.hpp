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

// Batch commands behind the dplda executable. Every command reads a resolved
// RunConfig and writes its artifacts into config.out.

#ifndef DPLDA_TOOLS_CLI_APP_HPP_
#define DPLDA_TOOLS_CLI_APP_HPP_

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplda/cgs.hpp"
#include "dplda/corpus.hpp"
#include "dplda/evaluation.hpp"
#include "dplda/io.hpp"
#include "dplda/laplace_baseline.hpp"
#include "dplda/local_privacy.hpp"
#include "dplda/privacy.hpp"
#include "dplda/synthetic.hpp"
#include "run_config.hpp"

namespace dplda::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// SHA-1 of "blob <size>\0<content>", as `git hash-object` prints it.
inline std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

/// {"<role>": {"path": ..., "git_blob_sha1": ...}} for each non-empty path.
inline json describe_inputs(const std::vector<std::pair<std::string, std::string>>& files) {
  json out = json::object();
  for (const auto& [role, path] : files) {
    if (path.empty()) continue;
    out[role] = {{"path", path}, {"git_blob_sha1", git_blob_hash(read_file(path))}};
  }
  return out;
}

struct Dataset {
  Corpus train;
  std::optional<Corpus> test;
  json inputs;
};

inline std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

/// Loads the training corpus and, when configured, a test corpus (from a
/// file or a random split). Stopword removal and top-V pruning are fitted on
/// the training side; the test side is mapped onto the resulting vocabulary.
inline Dataset load_dataset(const RunConfig& c) {
  if (c.docword.empty()) throw ConfigError("docword", "required");
  Dataset d;
  auto vocab_path = optional_path(c.vocab);
  if (!vocab_path) vocab_path = find_vocab_sidecar(c.docword);
  Corpus full = load_uci_bag_of_words(c.docword, vocab_path);
  d.inputs = describe_inputs({{"docword", c.docword},
                              {"vocab", vocab_path ? vocab_path->string() : ""},
                              {"stopwords", c.stopwords},
                              {"test", c.test},
                              {"test_vocab", c.test_vocab}});
  if (!c.test.empty()) {
    d.train = std::move(full);
    d.test = load_uci_bag_of_words(c.test, optional_path(c.test_vocab));
  } else if (c.n_test > 0) {
    auto [train, test] = split_train_test(full, c.n_test, c.seed);
    d.train = std::move(train);
    d.test = std::move(test);
  } else {
    d.train = std::move(full);
  }
  if (!c.stopwords.empty() || c.top_v) {
    std::unordered_set<std::string> stop;
    if (!c.stopwords.empty()) stop = load_stopwords(c.stopwords);
    d.train = preprocess(d.train, stop, c.top_v.value_or(d.train.vocab_size()));
  }
  if (d.test && !(d.test->vocab == d.train.vocab)) {
    d.test = restrict_to_vocabulary(*d.test, d.train.vocab);
  }
  if (c.binary) {
    d.train = binarize(d.train);
    if (d.test) d.test = binarize(*d.test);
  }
  return d;
}

inline json corpus_stats(const Corpus& corpus) {
  return {{"M", corpus.num_docs()},
          {"W", corpus.num_tokens()},
          {"V", corpus.vocab_size()},
          {"N_max", corpus.max_doc_length()}};
}

inline void write_json(const fs::path& path, const json& j) {
  write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

/// ingest: split, prune and write train/test corpora in UCI format.
inline int cmd_ingest(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  fs::create_directories(c.out);
  const fs::path out(c.out);
  save_uci_bag_of_words(d.train, out / "train.docword.txt", out / "train.vocab");
  json meta = {{"command", "ingest"},
               {"config", c.to_json()},
               {"inputs", d.inputs},
               {"train", corpus_stats(d.train)}};
  if (d.test) {
    save_uci_bag_of_words(*d.test, out / "test.docword.txt", out / "test.vocab");
    meta["test"] = corpus_stats(*d.test);
  }
  write_json(out / "ingest.json", meta);
  std::cout << meta["train"].dump() << '\n';
  return 0;
}

/// Trains with the configured mechanism and writes model.csv/model.json;
/// monitored runs add ledger.csv/ledger.json, lp runs add perturbed.txt.
/// When a test corpus is configured, perplexity.json is written as well.
inline int cmd_train(const RunConfig& c) {
  validate(c);
  Dataset d = load_dataset(c);
  fs::create_directories(c.out);
  const fs::path out(c.out);

  json meta = {{"command", "train"},
               {"config", c.to_json()},
               {"inputs", d.inputs},
               {"train", corpus_stats(d.train)},
               {"mechanism", mechanism_name(c.mechanism)}};
  TopicModel model;
  switch (c.mechanism) {
    case Mechanism::kPlain: {
      model = train(d.train, c.hyper, c.n_iters, c.seed).model;
      break;
    }
    case Mechanism::kMonitoredWord:
    case Mechanism::kMonitoredDoc: {
      const auto level = c.mechanism == Mechanism::kMonitoredWord
                             ? PrivacyLevel::word()
                             : PrivacyLevel::document(d.train.max_doc_length());
      PrivacyMonitor monitor(c.hyper, level, d.train.num_tokens());
      model = train(d.train, c.hyper, c.n_iters, c.seed, monitor).model;
      write_file(out / "ledger.csv",
                 [&](std::ostream& o) { write_ledger_csv(monitor.history(), o); });
      json summary = ledger_summary(monitor.ledger());
      summary["config"] = c.to_json();
      summary["inputs"] = d.inputs;
      write_json(out / "ledger.json", summary);
      meta["privacy"] = summary;
      break;
    }
    case Mechanism::kLocal: {
      const auto flip = flip_config(c);
      auto batch = perturb_corpus(d.train, flip.f(), derive_seed(c.seed, "lp.client"));
      write_file(out / "perturbed.txt",
                 [&](std::ostream& o) { write_perturbed_batch(batch, o); });
      auto result = lp_train_from_batch(std::move(batch), d.train.vocab, c.hyper,
                                        c.n_iters, c.seed);
      model = std::move(result.model);
      meta["privacy"] = {{"f", flip.f()},
                         {"local_epsilon", result.local_epsilon},
                         {"units", "nats"},
                         {"encoding", "binary"},
                         {"reconstructed", corpus_stats(result.reconstructed.corpus)}};
      if (d.test) d.test = binarize(*d.test);
      break;
    }
    case Mechanism::kLaplace: {
      auto result = baseline_train(d.train, c.hyper, *c.epsilon, c.n_iters, c.seed);
      model = std::move(result.model);
      meta["privacy"] = {{"mechanism", "laplace-init"},
                         {"epsilon", *c.epsilon},
                         {"per_entry_scale", result.per_entry_scale},
                         {"word_count_variance",
                          baseline_word_count_variance(*c.epsilon, c.hyper.num_topics)}};
      break;
    }
  }
  write_file(out / "model.csv", [&](std::ostream& o) { write_model_csv(model, o); });
  meta["model"] = {{"K", c.hyper.num_topics},
                   {"alpha", c.hyper.alpha},
                   {"beta", c.hyper.beta},
                   {"n_iters", c.n_iters},
                   {"seed", c.seed}};
  if (d.test) {
    const auto report = perplexity(model, *d.test, c.fold_in_iters, c.seed);
    json pj = {{"perplexity", report.perplexity},
               {"n_test_tokens", report.n_test_tokens},
               {"fold_in_iters", report.fold_in_iters},
               {"seed", report.seed},
               {"config", c.to_json()},
               {"inputs", d.inputs}};
    write_json(out / "perplexity.json", pj);
    meta["perplexity"] = report.perplexity;
  }
  write_json(out / "model.json", meta);
  return 0;
}

/// Loads model.csv plus hyperparameters from its model.json sidecar.
inline TopicModel load_model(const fs::path& csv) {
  Hyperparams hyper;
  auto sidecar = csv;
  sidecar.replace_extension(".json");
  if (fs::exists(sidecar)) {
    const auto meta = json::parse(read_file(sidecar));
    if (meta.contains("model")) {
      hyper.alpha = meta["model"].value("alpha", hyper.alpha);
      hyper.beta = meta["model"].value("beta", hyper.beta);
    }
  } else {
    dplda::detail::warn("no " + sidecar.string() + "; using alpha=" +
                        std::to_string(hyper.alpha));
  }
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw IoError("cannot open " + csv.string());
  return read_model_csv(in, hyper);
}

/// eval: perplexity of a saved model on a test corpus.
inline int cmd_eval(const RunConfig& c) {
  const std::string model_path =
      c.model.empty() ? (fs::path(c.out) / "model.csv").string() : c.model;
  if (c.test.empty()) throw ConfigError("test", "required");
  const TopicModel model = load_model(model_path);
  Corpus test = load_uci_bag_of_words(c.test, optional_path(c.test_vocab));
  if (!(test.vocab == model.vocab)) test = restrict_to_vocabulary(test, model.vocab);
  if (c.binary) test = binarize(test);
  const auto report = perplexity(model, test, c.fold_in_iters, c.seed);
  json pj = {{"perplexity", report.perplexity},
             {"n_test_tokens", report.n_test_tokens},
             {"fold_in_iters", report.fold_in_iters},
             {"seed", report.seed},
             {"config", c.to_json()},
             {"inputs", describe_inputs({{"model", model_path},
                                         {"test", c.test},
                                         {"test_vocab", c.test_vocab}})}};
  fs::create_directories(c.out);
  write_json(fs::path(c.out) / "perplexity.json", pj);
  std::cout << pj.dump(2) << '\n';
  return 0;
}

struct SweepRun {
  double f = 0.0;  // NaN when not applicable
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double perplexity = 0.0;
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Runs `job(i)` for i < count on up to `threads` workers; results land at their own index.
template <class Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  std::vector<std::jthread> pool;
  const std::size_t n = std::min(threads, count);
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
}

/// sweep: perplexity over a list of f or epsilon values and seeds.
/// Writes sweep_runs.csv (one row per run), sweep.csv (median per value) and
/// sweep.json.
inline int cmd_sweep(RunConfig c) {
  if (c.seeds.empty()) c.seeds = {c.seed};
  if (c.mechanism == Mechanism::kMonitoredWord || c.mechanism == Mechanism::kMonitoredDoc) {
    throw ConfigError("mechanism", "sweep supports plain, lp and laplace");
  }
  if (c.mechanism == Mechanism::kPlain) {
    if (!c.values.empty()) dplda::detail::warn("plain sweep ignores the value list");
    c.values = {std::numeric_limits<double>::quiet_NaN()};
  } else if (c.values.empty()) {
    throw ConfigError("values", "sweep needs at least one value");
  }
  std::string kind = c.value_kind;
  if (kind.empty()) kind = c.mechanism == Mechanism::kLaplace ? "epsilon" : "f";
  if (c.mechanism == Mechanism::kLaplace && kind != "epsilon") {
    throw ConfigError("value_kind", "laplace sweeps take epsilon values");
  }
  validate(c);
  Dataset d = load_dataset(c);
  if (!d.test) throw ConfigError("test", "sweep needs a test corpus (test or n_test)");
  if (c.mechanism == Mechanism::kLocal) d.test = binarize(*d.test);

  std::vector<SweepRun> runs(c.values.size() * c.seeds.size());
  const bool quiet = true;
  set_warnings_enabled(!quiet);
  parallel_for(runs.size(), c.threads, [&](std::size_t i) {
    const double value = c.values[i / c.seeds.size()];
    const std::uint64_t seed = c.seeds[i % c.seeds.size()];
    SweepRun run{std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN(), seed, 0.0};
    TopicModel model;
    if (c.mechanism == Mechanism::kLocal) {
      const auto flip =
          kind == "f" ? FlipConfig::from_flip(value) : FlipConfig::from_epsilon(value);
      run.f = flip.f();
      run.epsilon = flip.epsilon();
      model = lp_train(d.train, flip, c.hyper, c.n_iters, seed).model;
    } else if (c.mechanism == Mechanism::kLaplace) {
      run.epsilon = value;
      model = baseline_train(d.train, c.hyper, value, c.n_iters, seed).model;
    } else {
      model = train(d.train, c.hyper, c.n_iters, seed).model;
    }
    run.perplexity = perplexity(model, *d.test, c.fold_in_iters, seed).perplexity;
    runs[i] = run;
  });
  set_warnings_enabled(true);

  const fs::path out(c.out);
  fs::create_directories(out);
  auto cell = [](double x) { return std::isnan(x) ? std::string() : format_double(x); };
  const std::string mech = mechanism_name(c.mechanism);
  write_file(out / "sweep_runs.csv", [&](std::ostream& o) {
    o << "mechanism,f,epsilon,seed,perplexity\n";
    for (const auto& r : runs) {
      o << mech << ',' << cell(r.f) << ',' << cell(r.epsilon) << ',' << r.seed << ','
        << format_double(r.perplexity) << '\n';
    }
  });
  json rows = json::array();
  write_file(out / "sweep.csv", [&](std::ostream& o) {
    o << "mechanism,f,epsilon,median_perplexity,n_seeds\n";
    for (std::size_t v = 0; v < c.values.size(); ++v) {
      std::vector<double> ppl;
      for (std::size_t s = 0; s < c.seeds.size(); ++s) {
        ppl.push_back(runs[v * c.seeds.size() + s].perplexity);
      }
      const auto& first = runs[v * c.seeds.size()];
      const double med = median(ppl);
      o << mech << ',' << cell(first.f) << ',' << cell(first.epsilon) << ','
        << format_double(med) << ',' << ppl.size() << '\n';
      json row = {{"mechanism", mech}, {"median_perplexity", med}, {"perplexities", ppl}};
      row["f"] = std::isnan(first.f) ? json(nullptr) : json(first.f);
      row["epsilon"] = std::isnan(first.epsilon) ? json(nullptr) : json(first.epsilon);
      rows.push_back(row);
    }
  });
  json meta = {{"command", "sweep"},
               {"config", c.to_json()},
               {"inputs", d.inputs},
               {"value_kind", kind},
               {"train", corpus_stats(d.train)},
               {"test", corpus_stats(*d.test)},
               {"rows", rows}};
  if (c.mechanism == Mechanism::kLocal) meta["encoding"] = "binary";
  write_json(out / "sweep.json", meta);
  std::cout << read_file(out / "sweep.csv");
  return 0;
}

struct OracleOptions {
  std::vector<double> r;
  std::vector<double> b;
  std::size_t removed = 1;
  std::size_t instances = 0;  // > 0 selects random mode
  std::size_t max_removed = 5;
  std::size_t max_topics = 4;
  std::uint64_t seed = 1;
  std::string out;
};

/// oracle: compares the K + 1 candidate search with exhaustive enumeration,
/// either on one explicit (r, b, N) or on random small instances.
inline int cmd_oracle(const OracleOptions& o) {
  if (o.instances == 0) {
    if (o.r.empty() || o.r.size() != o.b.size()) {
      throw ConfigError("r", "give --r and --b of equal, non-zero length");
    }
    const auto pseudo = pseudo_distribution(o.r, o.b, o.removed);
    const auto fast = per_sampling_epsilon_breakdown(o.r, pseudo.q);
    const auto brute = brute_force_epsilon(o.r, o.b, o.removed);
    json j = {{"K", o.r.size()},
              {"N", o.removed},
              {"per_sampling_epsilon", o.removed == 0 ? 0.0 : fast.epsilon},
              {"xi_topic", fast.xi_topic},
              {"xi_rest", fast.xi_rest},
              {"argmax_topic", fast.argmax_topic},
              {"brute_force_epsilon", brute.epsilon},
              {"brute_force_epsilon_single_topic", brute.epsilon_on_p},
              {"partitions", brute.partitions},
              {"argmax_partition", brute.argmax}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  if (o.max_topics < 2) throw ConfigError("max_topics", "must be >= 2");
  Rng rng(derive_seed(o.seed, "oracle"));
  std::ostringstream csv;
  csv << "instance,K,N,per_sampling,brute_force,brute_force_single_topic,partitions\n";
  std::size_t unsound = 0, inexact = 0;
  for (std::size_t i = 0; i < o.instances; ++i) {
    const std::size_t k = 2 + i % (o.max_topics - 1);
    const std::size_t n = 1 + (i / (o.max_topics - 1)) % o.max_removed;
    const auto inst = random_sampling_instance(rng, k, n);
    const auto dist = full_conditional(inst.counts, 0, 0, inst.hyper);
    const auto pseudo = pseudo_distribution(inst.counts, 0, 0, inst.hyper, n);
    const double fast = per_sampling_epsilon(dist, pseudo, n);
    const auto brute = brute_force_epsilon(inst.counts, 0, 0, inst.hyper, n);
    if (brute.epsilon > brute.epsilon_on_p) ++unsound;
    if (std::abs(fast - brute.epsilon_on_p) > 1e-9 * std::max(1.0, brute.epsilon_on_p)) {
      ++inexact;
    }
    csv << i << ',' << k << ',' << n << ',' << format_double(fast) << ','
        << format_double(brute.epsilon) << ',' << format_double(brute.epsilon_on_p) << ','
        << brute.partitions << '\n';
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "oracle.csv", [&](std::ostream& s) { s << csv.str(); });
  }
  json summary = {{"instances", o.instances},
                  {"worst_partition_outside_single_topic_set", unsound},
                  {"mismatch_with_single_topic_max", inexact}};
  std::cout << summary.dump(2) << '\n';
  return unsound == 0 && inexact == 0 ? 0 : 1;
}

}  // namespace dplda::cli

#endif  // DPLDA_TOOLS_CLI_APP_HPP_
