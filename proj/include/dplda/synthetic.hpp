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

// Planted-topic corpora drawn from the LDA generative process, for tests,
// acceptance runs and demos.

#ifndef DPLDA_SYNTHETIC_HPP_
#define DPLDA_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dplda/cgs.hpp"
#include "dplda/corpus.hpp"
#include "dplda/rng.hpp"

namespace dplda {

struct PlantedSpec {
  std::size_t num_docs = 100;
  std::size_t vocab_size = 20;
  std::size_t num_topics = 2;
  std::size_t doc_length = 20;
  double doc_topic_alpha = 0.1;
  // Probability that a token ignores its topic block and picks any word.
  double leak = 0.0;
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  Corpus corpus;
  std::vector<std::vector<double>> phi;  // generating topic-word rows
};

/// Topic k is uniform over the k-th contiguous block of V/K words (the last
/// block absorbs the remainder), mixed with a uniform leak.
inline PlantedCorpus make_planted_corpus(const PlantedSpec& spec) {
  if (spec.num_topics < 1 || spec.vocab_size < spec.num_topics) {
    throw std::invalid_argument("need 1 <= K <= V for a planted corpus");
  }
  const std::size_t block = spec.vocab_size / spec.num_topics;
  PlantedCorpus out;
  out.phi.assign(spec.num_topics, std::vector<double>(spec.vocab_size, 0.0));
  for (std::size_t k = 0; k < spec.num_topics; ++k) {
    const std::size_t lo = k * block;
    const std::size_t hi = k + 1 == spec.num_topics ? spec.vocab_size : lo + block;
    for (std::size_t t = 0; t < spec.vocab_size; ++t) {
      out.phi[k][t] = spec.leak / static_cast<double>(spec.vocab_size);
      if (t >= lo && t < hi) {
        out.phi[k][t] += (1.0 - spec.leak) / static_cast<double>(hi - lo);
      }
    }
  }

  Rng rng(derive_seed(spec.seed, "synthetic"));
  std::gamma_distribution<double> gamma(spec.doc_topic_alpha, 1.0);
  out.corpus.vocab = Vocabulary::synthetic(spec.vocab_size);
  out.corpus.documents.resize(spec.num_docs);
  std::vector<double> theta(spec.num_topics);
  for (std::size_t m = 0; m < spec.num_docs; ++m) {
    double sum = 0.0;
    for (auto& x : theta) sum += (x = gamma(rng));
    if (sum == 0.0) {
      theta.assign(spec.num_topics, 0.0);
      theta[m % spec.num_topics] = 1.0;
    }
    std::discrete_distribution<std::size_t> topic(theta.begin(), theta.end());
    auto& doc = out.corpus.documents[m];
    doc.doc_id = static_cast<std::int64_t>(m);
    doc.tokens.reserve(spec.doc_length);
    for (std::size_t i = 0; i < spec.doc_length; ++i) {
      const std::size_t k = topic(rng);
      std::discrete_distribution<WordId> word(out.phi[k].begin(), out.phi[k].end());
      doc.tokens.push_back(word(rng));
    }
  }
  return out;
}

/// A single sampling step with random positive counts: document 0, word 0,
/// `removed` words on the neighbor side. Topics whose smoothed word total
/// would not exceed `removed` are redrawn, so the instance is always feasible.
struct SamplingInstance {
  CountMatrices counts;
  Hyperparams hyper;
  std::size_t removed = 1;
};

inline SamplingInstance random_sampling_instance(Rng& rng, std::size_t num_topics,
                                                 std::size_t removed,
                                                 std::size_t vocab_size = 4) {
  if (num_topics < 1 || vocab_size < 1) throw std::invalid_argument("need K, V >= 1");
  std::uniform_int_distribution<std::int64_t> word_count(0, 30);
  std::uniform_int_distribution<std::int64_t> doc_count(0, 12);
  std::uniform_real_distribution<double> alpha(0.05, 2.0);
  std::uniform_real_distribution<double> beta(0.01, 1.0);
  SamplingInstance inst;
  inst.removed = removed;
  inst.hyper = Hyperparams{num_topics, alpha(rng), beta(rng)};
  const double smoothing = static_cast<double>(vocab_size) * inst.hyper.beta;
  std::vector<std::vector<std::int64_t>> topic_word(num_topics,
                                                    std::vector<std::int64_t>(vocab_size));
  for (auto& row : topic_word) {
    double total = 0.0;
    do {
      total = smoothing;
      for (auto& x : row) total += static_cast<double>(x = word_count(rng));
    } while (!(total > static_cast<double>(removed)));
  }
  std::vector<std::vector<std::int64_t>> doc_topic(1, std::vector<std::int64_t>(num_topics));
  for (auto& x : doc_topic[0]) x = doc_count(rng);
  inst.counts = CountMatrices::from_tables(topic_word, doc_topic);
  return inst;
}

}  // namespace dplda

#endif  // DPLDA_SYNTHETIC_HPP_
