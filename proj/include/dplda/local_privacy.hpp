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

// Locally private LDA training.
//
// Clients encode each document as a presence vector over the vocabulary and
// pass every bit through randomized response: keep it with probability 1 - f,
// otherwise replace it with a fair coin. Only the perturbed vectors reach the
// server, which counts ones per word, inverts the channel to estimate the
// true counts, nudges randomly chosen bits until every column matches its
// estimate, and trains ordinary collapsed Gibbs sampling on the result.

#ifndef DPLDA_LOCAL_PRIVACY_HPP_
#define DPLDA_LOCAL_PRIVACY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplda/cgs.hpp"
#include "dplda/corpus.hpp"
#include "dplda/error.hpp"
#include "dplda/rng.hpp"

namespace dplda {

/// ln((1 - f/2) / (f/2)). f = 0 gives no local privacy and is rejected.
inline double rr_epsilon(double f) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw std::invalid_argument("flip probability must lie in (0, 1]; f=" +
                                std::to_string(f) + " has unbounded epsilon");
  }
  return std::log((1.0 - f / 2.0) / (f / 2.0));
}

/// Inverse of rr_epsilon: f = 2 / (e^eps + 1).
inline double rr_flip_for_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || std::isinf(epsilon)) {
    throw std::invalid_argument("local epsilon must be finite and >= 0");
  }
  return 2.0 / (std::exp(epsilon) + 1.0);
}

class FlipConfig {
 public:
  static FlipConfig from_flip(double f) { return FlipConfig(f, rr_epsilon(f)); }
  static FlipConfig from_epsilon(double epsilon) {
    const double f = rr_flip_for_epsilon(epsilon);
    return FlipConfig(f, rr_epsilon(f));
  }

  double f() const { return f_; }
  double epsilon() const { return epsilon_; }

 private:
  FlipConfig(double f, double epsilon) : f_(f), epsilon_(epsilon) {}
  double f_;
  double epsilon_;
};

/// Randomized response on every bit. One uniform draw u per bit: u < f/2
/// reports 1, f/2 <= u < f reports 0, otherwise the bit is kept. Runs with a
/// smaller f on the same stream randomize a subset of the same bits.
inline BinaryDocVector perturb_vector(const BinaryDocVector& v, double f, Rng& rng) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("f must lie in [0, 1]");
  BinaryDocVector out = v;
  const double half = f / 2.0;
  for (auto& bit : out.bits) {
    const double u = uniform01(rng);
    if (u < half) {
      bit = 1;
    } else if (u < f) {
      bit = 0;
    }
  }
  return out;
}

/// What crosses from clients to the server: perturbed vectors and the
/// public flip probability. Nothing else about the original corpus.
struct PerturbedBatch {
  std::size_t vocab_size = 0;
  double f = 0.0;
  std::vector<BinaryDocVector> vectors;
};

/// Client role: encode and perturb every document with its own stream.
inline PerturbedBatch perturb_corpus(const Corpus& corpus, double f, std::uint64_t seed) {
  PerturbedBatch batch{corpus.vocab_size(), f, {}};
  batch.vectors.reserve(corpus.num_docs());
  for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
    Rng rng(derive_seed(seed, "lp.perturb", m));
    batch.vectors.push_back(
        perturb_vector(encode_binary(corpus.documents[m], corpus.vocab_size()), f, rng));
  }
  return batch;
}

struct NoisyCounts {
  std::vector<std::int64_t> ones;  // n_t
  std::size_t num_vectors = 0;     // M
  double f = 0.0;
};

inline NoisyCounts aggregate(const std::vector<BinaryDocVector>& vectors, double f) {
  NoisyCounts nc{{}, vectors.size(), f};
  if (vectors.empty()) return nc;
  const std::size_t v = vectors.front().size();
  nc.ones.assign(v, 0);
  for (const auto& vec : vectors) {
    if (vec.size() != v) {
      throw std::invalid_argument("vectors of length " + std::to_string(vec.size()) +
                                  " and " + std::to_string(v) + " cannot be aggregated");
    }
    for (std::size_t t = 0; t < v; ++t) nc.ones[t] += vec.bits[t];
  }
  return nc;
}

/// Unbiased estimate N_t = (2 n_t - f M) / (2 (1 - f)), unclamped.
inline std::vector<double> estimate_true_counts(const NoisyCounts& nc) {
  if (!(nc.f < 1.0)) {
    throw std::invalid_argument("count estimator is undefined at f = 1");
  }
  const double m = static_cast<double>(nc.num_vectors);
  std::vector<double> out(nc.ones.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = (2.0 * static_cast<double>(nc.ones[t]) - nc.f * m) / (2.0 * (1.0 - nc.f));
  }
  return out;
}

/// Variance of the estimator: (2 - f) f M / (4 (1 - f)^2).
inline double estimator_variance(double f, std::size_t num_vectors) {
  if (!(f >= 0.0 && f < 1.0)) throw std::invalid_argument("f must lie in [0, 1)");
  return (2.0 - f) * f * static_cast<double>(num_vectors) / (4.0 * (1.0 - f) * (1.0 - f));
}

struct ReconstructedCorpus {
  std::vector<BinaryDocVector> vectors;
  std::vector<std::int64_t> targets;  // clamp(round(N_t), 0, M)
  Corpus corpus;
};

/// Adjusts each column to its estimated count by setting (or clearing)
/// uniformly chosen bits, then emits one token per set bit.
inline ReconstructedCorpus reconstruct(std::vector<BinaryDocVector> vectors,
                                       const NoisyCounts& nc, const Vocabulary& vocab,
                                       std::uint64_t seed) {
  const std::size_t m_count = vectors.size();
  if (m_count != nc.num_vectors) {
    throw std::invalid_argument("vector count disagrees with aggregated counts");
  }
  const std::size_t v = nc.ones.size();
  if (m_count > 0 && v != vocab.size()) {
    throw std::invalid_argument("vocabulary size disagrees with vector length");
  }
  ReconstructedCorpus out;
  out.targets.assign(v, 0);
  if (m_count > 0) {
    const auto estimate = estimate_true_counts(nc);
    std::vector<std::size_t> candidates;
    candidates.reserve(m_count);
    for (std::size_t t = 0; t < v; ++t) {
      const double rounded = std::round(estimate[t]);  // half away from zero
      const auto target = static_cast<std::int64_t>(
          std::clamp(rounded, 0.0, static_cast<double>(m_count)));
      out.targets[t] = target;
      std::int64_t ones = 0;
      for (const auto& vec : vectors) ones += vec.bits[t];
      const std::int64_t delta = target - ones;
      if (delta == 0) continue;
      const std::uint8_t from = delta > 0 ? 0 : 1;
      candidates.clear();
      for (std::size_t i = 0; i < m_count; ++i) {
        if (vectors[i].bits[t] == from) candidates.push_back(i);
      }
      auto need = static_cast<std::size_t>(delta > 0 ? delta : -delta);
      if (need > candidates.size()) {
        // Unreachable with a clamped target and exact counts.
        detail::warn("column " + std::to_string(t) + " needs " + std::to_string(need) +
                     " flips but only " + std::to_string(candidates.size()) +
                     " vectors qualify");
        need = candidates.size();
      }
      Rng rng(derive_seed(seed, "lp.reconstruct", t));
      for (std::size_t i = 0; i < need; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
        vectors[candidates[i]].bits[t] = static_cast<std::uint8_t>(1 - from);
      }
    }
  }
  out.corpus.vocab = vocab;
  out.corpus.documents.reserve(m_count);
  for (const auto& vec : vectors) {
    Document d{vec.doc_id, {}};
    for (std::size_t t = 0; t < vec.size(); ++t) {
      if (vec.bits[t]) d.tokens.push_back(static_cast<WordId>(t));
    }
    out.corpus.documents.push_back(std::move(d));
  }
  out.vectors = std::move(vectors);
  return out;
}

struct LpResult {
  TopicModel model;
  ReconstructedCorpus reconstructed;
  double local_epsilon = 0.0;
};

/// Server role: aggregate, reconstruct and train on a received batch.
inline LpResult lp_train_from_batch(PerturbedBatch batch, const Vocabulary& vocab,
                                    const Hyperparams& hyper, std::size_t n_iters,
                                    std::uint64_t seed) {
  const auto nc = aggregate(batch.vectors, batch.f);
  LpResult out;
  out.local_epsilon = rr_epsilon(batch.f);
  out.reconstructed =
      reconstruct(std::move(batch.vectors), nc, vocab, derive_seed(seed, "lp.server"));
  out.model = train(out.reconstructed.corpus, hyper, n_iters, seed).model;
  return out;
}

inline LpResult lp_train(const Corpus& corpus, const FlipConfig& flip,
                         const Hyperparams& hyper, std::size_t n_iters, std::uint64_t seed) {
  auto batch = perturb_corpus(corpus, flip.f(), derive_seed(seed, "lp.client"));
  return lp_train_from_batch(std::move(batch), corpus.vocab, hyper, n_iters, seed);
}

/// Exchange format: a one-line JSON header {"M":..,"V":..,"f":..} followed by
/// one line of V '0'/'1' characters per document.
inline void write_perturbed_batch(const PerturbedBatch& batch, std::ostream& out) {
  nlohmann::json header = {
      {"M", batch.vectors.size()}, {"V", batch.vocab_size}, {"f", batch.f}};
  out << header.dump() << '\n';
  std::string line;
  for (const auto& vec : batch.vectors) {
    line.assign(vec.size(), '0');
    for (std::size_t t = 0; t < vec.size(); ++t) {
      if (vec.bits[t]) line[t] = '1';
    }
    out << line << '\n';
  }
}

inline PerturbedBatch read_perturbed_batch(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing JSON header", 1);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON header: ") + e.what(), 1);
  }
  PerturbedBatch batch;
  std::size_t m_count = 0;
  try {
    m_count = header.at("M").get<std::size_t>();
    batch.vocab_size = header.at("V").get<std::size_t>();
    batch.f = header.at("f").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("incomplete header: ") + e.what(), 1);
  }
  batch.vectors.reserve(m_count);
  for (std::size_t i = 0; i < m_count; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(m_count) + " vectors", i + 2);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != batch.vocab_size) {
      throw ParseError("vector has " + std::to_string(line.size()) + " bits, expected " +
                           std::to_string(batch.vocab_size),
                       i + 2);
    }
    BinaryDocVector vec{static_cast<std::int64_t>(i), std::vector<std::uint8_t>(line.size())};
    for (std::size_t t = 0; t < line.size(); ++t) {
      if (line[t] != '0' && line[t] != '1') throw ParseError("non-binary character", i + 2);
      vec.bits[t] = line[t] == '1';
    }
    batch.vectors.push_back(std::move(vec));
  }
  return batch;
}

}  // namespace dplda

#endif  // DPLDA_LOCAL_PRIVACY_HPP_
