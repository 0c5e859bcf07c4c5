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

#ifndef DPLDA_EVALUATION_HPP_
#define DPLDA_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dplda/cgs.hpp"
#include "dplda/corpus.hpp"
#include "dplda/rng.hpp"

namespace dplda {

struct PerplexityReport {
  double perplexity = 0.0;
  std::size_t n_test_tokens = 0;
  std::size_t fold_in_iters = 0;
  std::uint64_t seed = 0;
};

/// Log-likelihood of one held-out document under `model`. theta is inferred
/// by Gibbs sampling with phi held fixed; the stream depends only on the seed
/// and the document's tokens.
inline double fold_in_log_likelihood(const TopicModel& model, const Document& doc,
                                     std::size_t fold_in_iters, std::uint64_t seed) {
  const std::size_t k_count = model.num_topics();
  const double alpha = model.hyper.alpha;
  Rng rng(derive_seed(seed, "eval.fold_in", hash_tokens(doc.tokens)));
  std::uniform_int_distribution<TopicId> pick(0, static_cast<TopicId>(k_count - 1));

  std::vector<TopicId> z(doc.tokens.size());
  std::vector<std::int64_t> n_k(k_count, 0);
  for (auto& zi : z) {
    zi = pick(rng);
    ++n_k[zi];
  }
  SamplingDistribution dist;
  dist.r.resize(k_count);
  for (std::size_t it = 0; it < fold_in_iters; ++it) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      const WordId t = doc.tokens[i];
      --n_k[z[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        dist.r[k] = model.phi[k][t] * (static_cast<double>(n_k[k]) + alpha);
        total += dist.r[k];
      }
      dist.total = total;
      z[i] = sample_topic(dist, rng);
      ++n_k[z[i]];
    }
  }

  const double denom = static_cast<double>(doc.tokens.size()) +
                       static_cast<double>(k_count) * alpha;
  std::vector<double> theta(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    theta[k] = (static_cast<double>(n_k[k]) + alpha) / denom;
  }
  double ll = 0.0;
  for (WordId t : doc.tokens) {
    double p = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) p += theta[k] * model.phi[k][t];
    ll += std::log(p);
  }
  return ll;
}

/// exp(-sum log p(token) / token count) over the non-empty test documents.
inline PerplexityReport perplexity(const TopicModel& model, const Corpus& test,
                                   std::size_t fold_in_iters, std::uint64_t seed) {
  if (model.num_topics() == 0) throw std::invalid_argument("model has no topics");
  const std::size_t v = model.vocab_size();
  for (const auto& d : test.documents) {
    for (WordId t : d.tokens) {
      if (t >= v) {
        throw std::invalid_argument("test document " + std::to_string(d.doc_id) +
                                    " has word id " + std::to_string(t) +
                                    " outside the model vocabulary");
      }
    }
  }
  double ll = 0.0;
  std::size_t n_tokens = 0;
  for (const auto& d : test.documents) {
    if (d.tokens.empty()) continue;
    ll += fold_in_log_likelihood(model, d, fold_in_iters, seed);
    n_tokens += d.tokens.size();
  }
  if (n_tokens == 0) throw std::invalid_argument("test corpus has no tokens");
  return {std::exp(-ll / static_cast<double>(n_tokens)), n_tokens, fold_in_iters, seed};
}

/// The n highest-probability words of topic k, ties broken by word id.
inline std::vector<std::string> top_words(const TopicModel& model, std::size_t k,
                                          std::size_t n) {
  const auto& row = model.phi.at(k);
  if (n > row.size()) throw std::invalid_argument("n exceeds vocabulary size");
  std::vector<WordId> ids(row.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](WordId a, WordId b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(model.vocab.word(ids[i]));
  return out;
}

}  // namespace dplda

#endif  // DPLDA_EVALUATION_HPP_
