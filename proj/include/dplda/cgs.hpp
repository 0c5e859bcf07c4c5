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

// Collapsed Gibbs sampling for LDA.
//
// The sampler visits documents in index order and tokens in position order.
// For each token it removes the current assignment from the counts, forms
//
//   r_k = (n_kt + beta) / (n_k + V beta) * (n_mk + alpha) / (n_m + K alpha)
//
// over the decremented counts, hands the distribution to the observer, draws
// the new topic and adds it back. Observers see every sampling step but never
// touch the random stream, so attaching one cannot change the chain.

#ifndef DPLDA_CGS_HPP_
#define DPLDA_CGS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dplda/corpus.hpp"
#include "dplda/rng.hpp"

namespace dplda {

using TopicId = std::uint32_t;

struct Hyperparams {
  std::size_t num_topics = 50;
  double alpha = 0.1;
  double beta = 0.01;

  void validate() const {
    if (num_topics < 1) throw std::invalid_argument("K must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  }
};

/// Sufficient statistics of the chain plus the assignments themselves.
///
/// n_kt is K x V and n_mk is M x K, both row-major. Outside a sampling step
/// n_k and n_m are the row sums and n_m[m] equals the length of document m.
struct CountMatrices {
  std::size_t num_topics = 0;
  std::size_t vocab_size = 0;
  std::vector<std::int64_t> n_kt;
  std::vector<std::int64_t> n_mk;
  std::vector<std::int64_t> n_k;
  std::vector<std::int64_t> n_m;
  std::vector<std::vector<TopicId>> z;

  CountMatrices() = default;
  CountMatrices(std::size_t k, std::size_t v, std::size_t m)
      : num_topics(k),
        vocab_size(v),
        n_kt(k * v, 0),
        n_mk(m * k, 0),
        n_k(k, 0),
        n_m(m, 0),
        z(m) {}

  std::size_t num_docs() const { return n_m.size(); }

  std::int64_t& kt(std::size_t k, std::size_t t) { return n_kt[k * vocab_size + t]; }
  std::int64_t kt(std::size_t k, std::size_t t) const {
    return n_kt[k * vocab_size + t];
  }
  std::int64_t& mk(std::size_t m, std::size_t k) { return n_mk[m * num_topics + k]; }
  std::int64_t mk(std::size_t m, std::size_t k) const {
    return n_mk[m * num_topics + k];
  }

  /// Recomputes n_k and n_m from the matrices.
  void recompute_totals() {
    std::fill(n_k.begin(), n_k.end(), 0);
    std::fill(n_m.begin(), n_m.end(), 0);
    for (std::size_t k = 0; k < num_topics; ++k) {
      for (std::size_t t = 0; t < vocab_size; ++t) n_k[k] += kt(k, t);
    }
    for (std::size_t m = 0; m < num_docs(); ++m) {
      for (std::size_t k = 0; k < num_topics; ++k) n_m[m] += mk(m, k);
    }
  }

  /// Builds counts from explicit tables (no assignments). Rows of
  /// `topic_word` are topics; rows of `doc_topic` are documents.
  static CountMatrices from_tables(
      const std::vector<std::vector<std::int64_t>>& topic_word,
      const std::vector<std::vector<std::int64_t>>& doc_topic) {
    if (topic_word.empty() || topic_word[0].empty()) {
      throw std::invalid_argument("topic-word table must be non-empty");
    }
    CountMatrices c(topic_word.size(), topic_word[0].size(), doc_topic.size());
    for (std::size_t k = 0; k < c.num_topics; ++k) {
      if (topic_word[k].size() != c.vocab_size) {
        throw std::invalid_argument("ragged topic-word table");
      }
      for (std::size_t t = 0; t < c.vocab_size; ++t) c.kt(k, t) = topic_word[k][t];
    }
    for (std::size_t m = 0; m < c.num_docs(); ++m) {
      if (doc_topic[m].size() != c.num_topics) {
        throw std::invalid_argument("doc-topic row has wrong width");
      }
      for (std::size_t k = 0; k < c.num_topics; ++k) c.mk(m, k) = doc_topic[m][k];
    }
    c.recompute_totals();
    return c;
  }

  friend bool operator==(const CountMatrices&, const CountMatrices&) = default;
};

/// Returns an empty string when every count invariant holds against
/// `corpus`, otherwise a description of the first violation.
inline std::string count_invariant_violation(const CountMatrices& c,
                                             const Corpus& corpus) {
  if (c.num_docs() != corpus.num_docs() || c.vocab_size != corpus.vocab_size()) {
    return "shape mismatch";
  }
  CountMatrices expect(c.num_topics, c.vocab_size, c.num_docs());
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    const auto& tokens = corpus.documents[m].tokens;
    if (c.z[m].size() != tokens.size()) {
      return "z length mismatch in document " + std::to_string(m);
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const TopicId k = c.z[m][i];
      if (k >= c.num_topics) return "z out of range in document " + std::to_string(m);
      ++expect.kt(k, tokens[i]);
      ++expect.mk(m, k);
    }
  }
  expect.recompute_totals();
  if (expect.n_kt != c.n_kt) return "n_kt disagrees with z";
  if (expect.n_mk != c.n_mk) return "n_mk disagrees with z";
  if (expect.n_k != c.n_k) return "n_k is not the row sum of n_kt";
  if (expect.n_m != c.n_m) return "n_m is not the document length";
  return {};
}

/// Unnormalized masses r and probabilities p over topics for one token.
struct SamplingDistribution {
  std::vector<double> r;
  std::vector<double> p;
  double total = 0.0;
};

/// Topic-word denominator b_k = sum_t (n_kt + beta) = n_k + V beta.
inline double topic_word_denominator(const CountMatrices& c, std::size_t k,
                                     const Hyperparams& hyper) {
  return static_cast<double>(c.n_k[k]) + static_cast<double>(c.vocab_size) * hyper.beta;
}

/// Fills `out` with the full conditional for word `t` in document `m`. The
/// token being resampled must already be removed from `counts`.
inline void full_conditional(const CountMatrices& counts, std::size_t m, WordId t,
                             const Hyperparams& hyper, SamplingDistribution& out) {
  const std::size_t k_count = counts.num_topics;
  out.r.resize(k_count);
  out.p.resize(k_count);
  const double doc_denom = static_cast<double>(counts.n_m[m]) +
                           static_cast<double>(k_count) * hyper.alpha;
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double word_term = (static_cast<double>(counts.kt(k, t)) + hyper.beta) /
                             topic_word_denominator(counts, k, hyper);
    const double doc_term = (static_cast<double>(counts.mk(m, k)) + hyper.alpha) / doc_denom;
    out.r[k] = word_term * doc_term;
    total += out.r[k];
  }
  out.total = total;
  for (std::size_t k = 0; k < k_count; ++k) out.p[k] = out.r[k] / total;
}

inline SamplingDistribution full_conditional(const CountMatrices& counts,
                                             std::size_t m, WordId t,
                                             const Hyperparams& hyper) {
  SamplingDistribution d;
  full_conditional(counts, m, t, hyper, d);
  return d;
}

/// Inverse-CDF draw over the unnormalized masses. Consumes one engine draw.
inline TopicId sample_topic(const SamplingDistribution& dist, Rng& rng) {
  const double u = uniform01(rng) * dist.total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < dist.r.size(); ++k) {
    if (dist.r[k] <= 0.0) continue;
    acc += dist.r[k];
    last_positive = k;
    if (u < acc) return static_cast<TopicId>(k);
  }
  return static_cast<TopicId>(last_positive);
}

/// What an observer sees for one sampling step. `counts` excludes the token
/// being resampled.
struct SamplingEvent {
  std::size_t iteration;
  std::size_t position;  // token index over the whole corpus, 0..W-1
  std::size_t doc;
  std::size_t index_in_doc;
  WordId word;
  const CountMatrices& counts;
  const SamplingDistribution& dist;
};

template <class O>
concept SamplingObserver = requires(O& o, const SamplingEvent& e) { o.on_sample(e); };

struct NullObserver {
  void on_sample(const SamplingEvent&) {}
};

namespace detail {

inline void decrement(std::int64_t& x) {
  // Laplace-privatized starts can hold zeros under a live assignment.
  if (x > 0) --x;
}

template <class O>
void notify_iteration_end(O& observer, std::size_t iteration) {
  if constexpr (requires { observer.on_iteration_end(iteration); }) {
    observer.on_iteration_end(iteration);
  }
}

}  // namespace detail

/// Assigns every token a uniformly random topic.
inline CountMatrices init_assignments(const Corpus& corpus, const Hyperparams& hyper,
                                      Rng& rng) {
  hyper.validate();
  CountMatrices c(hyper.num_topics, corpus.vocab_size(), corpus.num_docs());
  std::uniform_int_distribution<TopicId> pick(
      0, static_cast<TopicId>(hyper.num_topics - 1));
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    const auto& tokens = corpus.documents[m].tokens;
    c.z[m].resize(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const TopicId k = pick(rng);
      c.z[m][i] = k;
      ++c.kt(k, tokens[i]);
      ++c.mk(m, k);
      ++c.n_k[k];
      ++c.n_m[m];
    }
  }
  return c;
}

inline CountMatrices init_assignments(const Corpus& corpus, const Hyperparams& hyper,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return init_assignments(corpus, hyper, rng);
}

/// One sweep over every token of `corpus`.
template <SamplingObserver O = NullObserver>
void run_iteration(const Corpus& corpus, CountMatrices& counts, const Hyperparams& hyper,
                   Rng& rng, O& observer, std::size_t iteration = 0) {
  SamplingDistribution dist;
  std::size_t position = 0;
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    const auto& tokens = corpus.documents[m].tokens;
    auto& z = counts.z[m];
    for (std::size_t i = 0; i < tokens.size(); ++i, ++position) {
      const WordId t = tokens[i];
      const TopicId old = z[i];
      detail::decrement(counts.kt(old, t));
      detail::decrement(counts.mk(m, old));
      detail::decrement(counts.n_k[old]);
      detail::decrement(counts.n_m[m]);

      full_conditional(counts, m, t, hyper, dist);
      observer.on_sample(SamplingEvent{iteration, position, m, i, t, counts, dist});
      const TopicId k = sample_topic(dist, rng);

      z[i] = k;
      ++counts.kt(k, t);
      ++counts.mk(m, k);
      ++counts.n_k[k];
      ++counts.n_m[m];
    }
  }
}

inline void run_iteration(const Corpus& corpus, CountMatrices& counts,
                          const Hyperparams& hyper, Rng& rng) {
  NullObserver none;
  run_iteration(corpus, counts, hyper, rng, none);
}

/// Trained topic-word distributions.
struct TopicModel {
  Hyperparams hyper;
  Vocabulary vocab;
  std::vector<std::vector<double>> phi;  // K x V

  std::size_t num_topics() const { return phi.size(); }
  std::size_t vocab_size() const { return vocab.size(); }
};

/// Posterior mean phi_kt = (n_kt + beta) / (n_k + V beta).
inline TopicModel estimate_phi(const CountMatrices& counts, const Hyperparams& hyper,
                               const Vocabulary& vocab) {
  TopicModel model{hyper, vocab, {}};
  model.phi.assign(counts.num_topics, std::vector<double>(counts.vocab_size));
  for (std::size_t k = 0; k < counts.num_topics; ++k) {
    const double denom = topic_word_denominator(counts, k, hyper);
    for (std::size_t t = 0; t < counts.vocab_size; ++t) {
      model.phi[k][t] = (static_cast<double>(counts.kt(k, t)) + hyper.beta) / denom;
    }
  }
  return model;
}

/// theta_mk = (n_mk + alpha) / (n_m + K alpha).
inline std::vector<std::vector<double>> estimate_theta(const CountMatrices& counts,
                                                       const Hyperparams& hyper) {
  const std::size_t k_count = counts.num_topics;
  std::vector<std::vector<double>> theta(counts.num_docs(), std::vector<double>(k_count));
  for (std::size_t m = 0; m < counts.num_docs(); ++m) {
    const double denom = static_cast<double>(counts.n_m[m]) +
                         static_cast<double>(k_count) * hyper.alpha;
    for (std::size_t k = 0; k < k_count; ++k) {
      theta[m][k] = (static_cast<double>(counts.mk(m, k)) + hyper.alpha) / denom;
    }
  }
  return theta;
}

/// Runs `n_iters` sweeps from the given state.
template <SamplingObserver O = NullObserver>
void continue_training(const Corpus& corpus, CountMatrices& counts,
                       const Hyperparams& hyper, std::size_t n_iters, Rng& rng,
                       O& observer) {
  for (std::size_t it = 0; it < n_iters; ++it) {
    run_iteration(corpus, counts, hyper, rng, observer, it);
    detail::notify_iteration_end(observer, it);
  }
}

struct TrainResult {
  TopicModel model;
  CountMatrices counts;
};

/// Random initialization followed by `n_iters` sweeps; phi is read from the
/// final state.
template <SamplingObserver O = NullObserver>
TrainResult train(const Corpus& corpus, const Hyperparams& hyper, std::size_t n_iters,
                  std::uint64_t seed, O& observer) {
  hyper.validate();
  corpus.validate();
  Rng rng(derive_seed(seed, "cgs"));
  CountMatrices counts = init_assignments(corpus, hyper, rng);
  continue_training(corpus, counts, hyper, n_iters, rng, observer);
  return {estimate_phi(counts, hyper, corpus.vocab), std::move(counts)};
}

inline TrainResult train(const Corpus& corpus, const Hyperparams& hyper,
                         std::size_t n_iters, std::uint64_t seed) {
  NullObserver none;
  return train(corpus, hyper, n_iters, seed, none);
}

}  // namespace dplda

#endif  // DPLDA_CGS_HPP_
