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

// Laplace-noise baseline: perturb the count matrices once after random
// initialization, then run the ordinary sampler.

#ifndef DPLDA_LAPLACE_BASELINE_HPP_
#define DPLDA_LAPLACE_BASELINE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dplda/cgs.hpp"
#include "dplda/local_privacy.hpp"
#include "dplda/rng.hpp"

namespace dplda {

/// Per-entry Laplace scale b = K / epsilon, so each noisy word count has
/// variance 2 K^2 / epsilon^2. epsilon = +inf means no noise.
class LaplaceConfig {
 public:
  LaplaceConfig(double epsilon, std::size_t num_topics) : epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("Laplace epsilon must be > 0");
    if (num_topics < 1) throw std::invalid_argument("K must be >= 1");
    scale_ = std::isinf(epsilon) ? 0.0 : static_cast<double>(num_topics) / epsilon;
  }

  double epsilon() const { return epsilon_; }
  double per_entry_scale() const { return scale_; }

 private:
  double epsilon_;
  double scale_;
};

/// Laplace(0, scale) by inversion of one uniform draw.
inline double sample_laplace(double scale, Rng& rng) {
  const double u = uniform01(rng) - 0.5;
  if (scale == 0.0) return 0.0;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

/// Adds one Laplace draw to every entry of n_kt and n_mk, rounds, clamps at
/// zero and recomputes the totals. Assignments z are left as they were.
inline CountMatrices privatize_counts(const CountMatrices& counts, const LaplaceConfig& cfg,
                                      Rng& rng) {
  CountMatrices out = counts;
  const double b = cfg.per_entry_scale();
  auto noisy = [&](std::int64_t x) {
    const double v = std::round(static_cast<double>(x) + sample_laplace(b, rng));
    return v <= 0.0 ? std::int64_t{0} : static_cast<std::int64_t>(v);
  };
  for (auto& x : out.n_kt) x = noisy(x);
  for (auto& x : out.n_mk) x = noisy(x);
  out.recompute_totals();
  return out;
}

/// Variance of a noisy word count under the baseline: 2 K^2 / epsilon^2.
inline double baseline_word_count_variance(double epsilon, std::size_t num_topics) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double k = static_cast<double>(num_topics);
  return 2.0 * k * k / (epsilon * epsilon);
}

/// True when the randomized-response count estimator at the same epsilon has
/// lower variance than the Laplace baseline.
inline bool local_variance_below_baseline(double epsilon, std::size_t num_vectors,
                                          std::size_t num_topics) {
  const double f = rr_flip_for_epsilon(epsilon);
  return estimator_variance(f, num_vectors) < baseline_word_count_variance(epsilon, num_topics);
}

/// Smallest grid point from which the local estimator beats the baseline at
/// every larger grid point, or nullopt if it never does at the top of the grid.
inline std::optional<double> variance_crossover(std::size_t num_vectors,
                                                std::size_t num_topics, double lo,
                                                double hi, std::size_t steps) {
  if (!(lo > 0.0 && hi > lo) || steps < 1) throw std::invalid_argument("bad sweep range");
  std::optional<double> crossover;
  for (std::size_t i = steps + 1; i-- > 0;) {
    const double eps = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    if (!local_variance_below_baseline(eps, num_vectors, num_topics)) break;
    crossover = eps;
  }
  return crossover;
}

struct BaselineResult {
  TopicModel model;
  CountMatrices counts;
  double per_entry_scale = 0.0;
};

/// Initialization, one-shot privatization, then the plain sampler. The chain
/// uses the same stream lineage as train().
inline BaselineResult baseline_train(const Corpus& corpus, const Hyperparams& hyper,
                                     double epsilon, std::size_t n_iters,
                                     std::uint64_t seed) {
  hyper.validate();
  corpus.validate();
  const LaplaceConfig cfg(epsilon, hyper.num_topics);
  Rng rng(derive_seed(seed, "cgs"));
  Rng noise_rng(derive_seed(seed, "laplace"));
  CountMatrices counts = init_assignments(corpus, hyper, rng);
  counts = privatize_counts(counts, cfg, noise_rng);
  NullObserver none;
  continue_training(corpus, counts, hyper, n_iters, rng, none);
  return {estimate_phi(counts, hyper, corpus.vocab), std::move(counts),
          cfg.per_entry_scale()};
}

}  // namespace dplda

#endif  // DPLDA_LAPLACE_BASELINE_HPP_
