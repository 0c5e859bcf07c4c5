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

// Inherent differential privacy of collapsed Gibbs sampling.
//
// Each sampling step draws topic k with probability p_k proportional to r_k,
// which is an exponential mechanism with utility ln p_k. A neighboring corpus
// removes N words (N = 1 at word level, N = N_max at document level). If N_k
// of the removed words carried topic k, only the topic-word denominator moves:
//
//   r'_k = r_k * b_k / (b_k - N_k),   b_k = sum_t (n_kt + beta).
//
// The assignment (N_1, ..., N_K) is a topic partition. For one partition the
// step is eps_gamma = 2 max_k |ln(p'_k / p_k)|-DP. The worst partition always
// puts all N words on a single topic, so the monitor only needs K + 1
// candidates built from the pseudo distribution q_k = r_k b_k / (b_k - N).
// brute_force_epsilon() enumerates every partition and serves as the oracle.
//
// Per-step guarantees compose sequentially over iterations for the same token
// position and in parallel across positions: the run total is the maximum
// over positions of the accumulated sums. All values are in nats.

#ifndef DPLDA_PRIVACY_HPP_
#define DPLDA_PRIVACY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dplda/cgs.hpp"
#include "dplda/error.hpp"

namespace dplda {

struct PrivacyLevel {
  enum class Kind { kWord, kDocument };

  Kind kind = Kind::kWord;
  std::size_t removed = 1;  // N

  static PrivacyLevel word() { return {Kind::kWord, 1}; }

  /// Document level for a corpus whose longest document has `max_doc_length`
  /// tokens.
  static PrivacyLevel document(std::size_t max_doc_length) {
    if (max_doc_length < 1) {
      throw std::invalid_argument("document-level privacy needs N_max >= 1");
    }
    return {Kind::kDocument, max_doc_length};
  }

  std::string name() const { return kind == Kind::kWord ? "word" : "document"; }
};

/// Topic partition (N_1, ..., N_K) of the removed words.
using TopicPartition = std::vector<std::int64_t>;

struct PseudoDistribution {
  std::vector<double> q;
  std::vector<double> b;  // topic-word denominators
};

namespace detail {

inline void require_feasible(std::span<const double> b, double removed) {
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (!(b[k] - removed > 0.0)) throw DegenerateCorpus(k, b[k], removed);
  }
}

inline std::vector<double> topic_denominators(const CountMatrices& counts,
                                              const Hyperparams& hyper) {
  std::vector<double> b(counts.num_topics);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = topic_word_denominator(counts, k, hyper);
  return b;
}

inline double sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace detail

/// Pseudo sampling distribution for removing `removed` words, from the same
/// decremented counts as the paired full conditional.
inline PseudoDistribution pseudo_distribution(const CountMatrices& counts, std::size_t m,
                                              WordId t, const Hyperparams& hyper,
                                              std::size_t removed) {
  PseudoDistribution out;
  out.b = detail::topic_denominators(counts, hyper);
  const double n = static_cast<double>(removed);
  detail::require_feasible(out.b, n);
  const double doc_denom = static_cast<double>(counts.n_m[m]) +
                           static_cast<double>(counts.num_topics) * hyper.alpha;
  out.q.resize(counts.num_topics);
  for (std::size_t k = 0; k < counts.num_topics; ++k) {
    out.q[k] = (static_cast<double>(counts.kt(k, t)) + hyper.beta) / (out.b[k] - n) *
               ((static_cast<double>(counts.mk(m, k)) + hyper.alpha) / doc_denom);
  }
  return out;
}

/// Same construction from the unnormalized masses and denominators directly.
inline PseudoDistribution pseudo_distribution(std::span<const double> r,
                                              std::span<const double> b,
                                              std::size_t removed) {
  if (r.size() != b.size()) throw std::invalid_argument("r and b differ in length");
  const double n = static_cast<double>(removed);
  detail::require_feasible(b, n);
  PseudoDistribution out{std::vector<double>(r.size()), {b.begin(), b.end()}};
  for (std::size_t k = 0; k < r.size(); ++k) out.q[k] = r[k] * b[k] / (b[k] - n);
  return out;
}

/// The K + 1 candidates behind one per-step bound.
struct EpsilonBreakdown {
  std::vector<double> xi_topic;  // |ln p'_k/p_k| for topic k when all N sit on k
  double xi_rest = 0.0;          // ln(sum r'/sum r) at the largest |r_k - q_k|
  std::size_t argmax_topic = 0;  // topic attaining ||r - q||_inf
  double epsilon = 0.0;
};

/// Privacy guarantee of one sampling step.
///
/// For each topic k, placing all removed words on k gives
/// S_k = sum_{j != k} r_j + q_k and xi_k = |ln((S_k / sum r) (r_k / q_k))|.
/// The other topics then move by ln(S_k / sum r), which is largest at the
/// topic maximizing |r_k - q_k| (ties to the smaller index). With a single
/// topic there are no other topics, so that term is skipped.
inline EpsilonBreakdown per_sampling_epsilon_breakdown(std::span<const double> r,
                                                       std::span<const double> q) {
  if (r.size() != q.size() || r.empty()) {
    throw std::invalid_argument("r and q must be non-empty and equal length");
  }
  const std::size_t k_count = r.size();
  const double sum_r = detail::sum(r);
  EpsilonBreakdown out;
  out.xi_topic.resize(k_count);
  double best_gap = -1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double s_ratio_log = std::log1p((q[k] - r[k]) / sum_r);
    out.xi_topic[k] = std::abs(s_ratio_log + std::log(r[k] / q[k]));
    worst = std::max(worst, out.xi_topic[k]);
    const double gap = std::abs(r[k] - q[k]);
    if (gap > best_gap) {
      best_gap = gap;
      out.argmax_topic = k;
    }
  }
  const std::size_t ks = out.argmax_topic;
  out.xi_rest = std::abs(std::log1p((q[ks] - r[ks]) / sum_r));
  if (k_count > 1) worst = std::max(worst, out.xi_rest);
  out.epsilon = 2.0 * worst;
  return out;
}

inline double per_sampling_epsilon(const SamplingDistribution& dist,
                                   const PseudoDistribution& pseudo,
                                   std::size_t removed) {
  if (removed == 0) return 0.0;
  return per_sampling_epsilon_breakdown(dist.r, pseudo.q).epsilon;
}

/// eps_gamma = 2 max_k |ln(p'_k / p_k)| for one partition.
inline double partition_epsilon(std::span<const double> r, std::span<const double> b,
                                const TopicPartition& partition) {
  const std::size_t k_count = r.size();
  if (b.size() != k_count || partition.size() != k_count) {
    throw std::invalid_argument("partition, r and b must have equal length");
  }
  std::vector<double> log_shift(k_count);
  double sum_r = 0.0;
  double sum_shifted = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double nk = static_cast<double>(partition[k]);
    if (nk < 0.0) throw std::invalid_argument("negative partition entry");
    if (!(b[k] - nk > 0.0)) throw DegenerateCorpus(k, b[k], nk);
    log_shift[k] = std::log(b[k] / (b[k] - nk));
    sum_r += r[k];
    sum_shifted += r[k] * b[k] / (b[k] - nk);
  }
  const double log_mass = std::log(sum_shifted / sum_r);
  double worst = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    worst = std::max(worst, std::abs(log_shift[k] - log_mass));
  }
  return 2.0 * worst;
}

/// Number of topic partitions of `removed` words over `topics` topics,
/// saturating at the largest uint64.
inline std::uint64_t partition_count(std::size_t removed, std::size_t topics) {
  if (topics == 0) return 0;
  // C(N + K - 1, K - 1) built incrementally; each step stays an integer.
  unsigned __int128 c = 1;
  const std::uint64_t n = removed + topics - 1;
  const std::uint64_t k = std::min<std::uint64_t>(topics - 1, removed);
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

inline constexpr std::uint64_t kMaxBruteForcePartitions = 1'000'000;

struct BruteForceResult {
  double epsilon = 0.0;       // max over every partition
  double epsilon_on_p = 0.0;  // max over single-topic partitions
  std::uint64_t partitions = 0;
  TopicPartition argmax;
};

/// Exhaustive search over all topic partitions.
inline BruteForceResult brute_force_epsilon(std::span<const double> r,
                                            std::span<const double> b,
                                            std::size_t removed) {
  const std::size_t k_count = r.size();
  if (k_count == 0 || b.size() != k_count) {
    throw std::invalid_argument("r and b must be non-empty and equal length");
  }
  const std::uint64_t total = partition_count(removed, k_count);
  if (total > kMaxBruteForcePartitions) {
    throw std::length_error("brute force refused: " + std::to_string(total) +
                            " partitions exceed the limit of " +
                            std::to_string(kMaxBruteForcePartitions));
  }
  detail::require_feasible(b, static_cast<double>(removed));

  BruteForceResult out;
  TopicPartition part(k_count, 0);
  auto visit = [&] {
    const double eps = partition_epsilon(r, b, part);
    if (out.partitions++ == 0 || eps > out.epsilon) {
      out.epsilon = eps;
      out.argmax = part;
    }
    if (std::find(part.begin(), part.end(), static_cast<std::int64_t>(removed)) !=
        part.end()) {
      out.epsilon_on_p = std::max(out.epsilon_on_p, eps);
    }
  };
  // Topic k takes 0..remaining words; the last topic takes what is left.
  auto fill = [&](auto& self, std::size_t k, std::int64_t remaining) -> void {
    if (k + 1 == k_count) {
      part[k] = remaining;
      visit();
      return;
    }
    for (std::int64_t take = 0; take <= remaining; ++take) {
      part[k] = take;
      self(self, k + 1, remaining - take);
    }
  };
  fill(fill, 0, static_cast<std::int64_t>(removed));
  return out;
}

inline BruteForceResult brute_force_epsilon(const CountMatrices& counts, std::size_t m,
                                            WordId t, const Hyperparams& hyper,
                                            std::size_t removed) {
  const auto dist = full_conditional(counts, m, t, hyper);
  const auto b = detail::topic_denominators(counts, hyper);
  return brute_force_epsilon(dist.r, b, removed);
}

/// Condition under which a partition with an empty topic has
/// eps_gamma = 2 ln(sum r' / sum r): for every other topic j,
/// ln(b_j / (b_j - N_j)) < 2 ln(sum r' / sum r). Returns false when no topic
/// is empty, since the condition then does not apply.
inline bool check_theorem1_condition(std::span<const double> r, std::span<const double> b,
                                     const TopicPartition& partition) {
  const std::size_t k_count = r.size();
  if (b.size() != k_count || partition.size() != k_count) {
    throw std::invalid_argument("partition, r and b must have equal length");
  }
  const auto empty = std::find(partition.begin(), partition.end(), 0);
  if (empty == partition.end()) return false;
  const auto k = static_cast<std::size_t>(empty - partition.begin());
  double sum_r = 0.0;
  double sum_shifted = 0.0;
  for (std::size_t j = 0; j < k_count; ++j) {
    const double nj = static_cast<double>(partition[j]);
    if (!(b[j] - nj > 0.0)) throw DegenerateCorpus(j, b[j], nj);
    sum_r += r[j];
    sum_shifted += r[j] * b[j] / (b[j] - nj);
  }
  const double rhs = 2.0 * std::log(sum_shifted / sum_r);
  for (std::size_t j = 0; j < k_count; ++j) {
    if (j == k) continue;
    const double nj = static_cast<double>(partition[j]);
    if (!(std::log(b[j] / (b[j] - nj)) < rhs)) return false;
  }
  return true;
}

inline bool check_theorem1_condition(const CountMatrices& counts, std::size_t m, WordId t,
                                     const Hyperparams& hyper,
                                     const TopicPartition& partition) {
  const auto dist = full_conditional(counts, m, t, hyper);
  return check_theorem1_condition(dist.r, detail::topic_denominators(counts, hyper),
                                  partition);
}

/// 2 ln(sum r' / sum r): the partition's guarantee when the empty-topic
/// condition holds.
inline double empty_topic_epsilon(std::span<const double> r, std::span<const double> b,
                                  const TopicPartition& partition) {
  double sum_r = 0.0;
  double sum_shifted = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double nk = static_cast<double>(partition.at(k));
    sum_r += r[k];
    sum_shifted += r[k] * b[k] / (b[k] - nk);
  }
  return 2.0 * std::log(sum_shifted / sum_r);
}

/// 2 max over topics with N_k > 0 of |ln((sum r'/sum r) (r_k / r'_k))|: the
/// partition's guarantee when the empty-topic condition fails.
inline double loaded_topic_epsilon(std::span<const double> r, std::span<const double> b,
                                   const TopicPartition& partition) {
  double sum_r = 0.0;
  double sum_shifted = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double nk = static_cast<double>(partition.at(k));
    sum_r += r[k];
    sum_shifted += r[k] * b[k] / (b[k] - nk);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (partition[k] == 0) continue;
    const double shifted = r[k] * b[k] / (b[k] - static_cast<double>(partition[k]));
    worst = std::max(worst, std::abs(std::log(sum_shifted / sum_r * (r[k] / shifted))));
  }
  return 2.0 * worst;
}

/// Per-token-position accumulator of per-step guarantees.
class PrivacyLedger {
 public:
  PrivacyLedger(std::size_t num_positions, PrivacyLevel level)
      : eps_(num_positions, 0.0), level_(level) {}

  void record(std::size_t position, double epsilon) {
    if (position >= eps_.size()) {
      throw std::out_of_range("token position " + std::to_string(position) +
                              " outside ledger of size " + std::to_string(eps_.size()));
    }
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    eps_[position] += epsilon;
    ++records_;
  }

  void finish_iteration() { ++iterations_; }

  /// max over positions of the accumulated sums.
  double total() const {
    if (eps_.empty()) {
      detail::warn("privacy ledger is empty; reporting 0");
      return 0.0;
    }
    return *std::max_element(eps_.begin(), eps_.end());
  }

  double mean() const {
    if (eps_.empty()) return 0.0;
    return detail::sum(eps_) / static_cast<double>(eps_.size());
  }

  const std::vector<double>& per_position() const { return eps_; }
  std::size_t iterations_recorded() const { return iterations_; }
  std::size_t records() const { return records_; }
  const PrivacyLevel& level() const { return level_; }

 private:
  std::vector<double> eps_;
  PrivacyLevel level_;
  std::size_t iterations_ = 0;
  std::size_t records_ = 0;
};

struct LedgerRow {
  std::size_t iteration;  // 1-based count of completed sweeps
  double max_cumulative;
  double mean_cumulative;
};

/// Sampling observer that prices every step and fills a ledger.
class PrivacyMonitor {
 public:
  PrivacyMonitor(const Hyperparams& hyper, PrivacyLevel level, std::size_t num_tokens)
      : hyper_(hyper), ledger_(num_tokens, level) {}

  void on_sample(const SamplingEvent& e) {
    const std::size_t n = ledger_.level().removed;
    const auto pseudo = pseudo_distribution(e.counts, e.doc, e.word, hyper_, n);
    ledger_.record(e.position, per_sampling_epsilon(e.dist, pseudo, n));
  }

  void on_iteration_end(std::size_t) {
    ledger_.finish_iteration();
    history_.push_back({ledger_.iterations_recorded(), ledger_.total(), ledger_.mean()});
  }

  const PrivacyLedger& ledger() const { return ledger_; }
  const std::vector<LedgerRow>& history() const { return history_; }

 private:
  Hyperparams hyper_;
  PrivacyLedger ledger_;
  std::vector<LedgerRow> history_;
};

}  // namespace dplda

#endif  // DPLDA_PRIVACY_HPP_
