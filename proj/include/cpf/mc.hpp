#pragma once

// Chunked Monte Carlo reduction shared by the trajectory and random-coupling
// engines. Work is split into fixed-size chunks of consecutive sample
// indices; every chunk is reduced serially and the chunk partials are merged
// in chunk order. The result is therefore bit-identical for the serial path
// and for the OpenMP path at any thread count.

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "cpf/core.hpp"

namespace cpf {

enum class Execution { serial, parallel };

struct McConfig {
  std::uint64_t n_trajectories = 1'000'000;
  std::uint64_t seed = 0x5EEDull;
  std::uint64_t chunk_size = 4096;
  /// Grid step for path-integrated sampling; 0 selects min(tau_c, 1/g)/50.
  double path_dt = 0.0;
  Execution execution = Execution::parallel;

  void validate() const;
  std::uint64_t n_chunks() const noexcept { return (n_trajectories + chunk_size - 1) / chunk_size; }
};

/// Running means and co-moments of K jointly sampled variables, merged with
/// the pairwise update of Chan, Golub & LeVeque.
template <std::size_t K>
struct MomentAccumulator {
  std::uint64_t count = 0;
  std::array<double, K> mean{};
  std::array<std::array<double, K>, K> comoment{};

  void push(const std::array<double, K>& v) noexcept {
    ++count;
    const double inv_n = 1.0 / static_cast<double>(count);
    std::array<double, K> delta{};
    for (std::size_t i = 0; i < K; ++i) {
      delta[i] = v[i] - mean[i];
      mean[i] += delta[i] * inv_n;
    }
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) comoment[i][j] += delta[i] * (v[j] - mean[j]);
  }

  void merge(const MomentAccumulator& other) noexcept {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    std::array<double, K> delta{};
    for (std::size_t i = 0; i < K; ++i) delta[i] = other.mean[i] - mean[i];
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j)
        comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / n;
    for (std::size_t i = 0; i < K; ++i) mean[i] += delta[i] * nb / n;
    count += other.count;
  }

  /// Sample covariance (n - 1 normalisation).
  double covariance(std::size_t i, std::size_t j) const noexcept {
    if (count < 2) return std::numeric_limits<double>::infinity();
    return comoment[i][j] / static_cast<double>(count - 1);
  }

  /// Standard error of the plug-in estimate g(mean) with gradient `grad`.
  double delta_method_error(const std::array<double, K>& grad) const noexcept {
    if (count < 2) return std::numeric_limits<double>::infinity();
    double var = 0.0;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) var += grad[i] * grad[j] * comoment[i][j];
    var /= static_cast<double>(count - 1) * static_cast<double>(count);
    return std::sqrt(std::max(var, 0.0));
  }

  Estimate estimate_mean(std::size_t i) const noexcept {
    std::array<double, K> grad{};
    grad[i] = 1.0;
    return {mean[i], delta_method_error(grad), count};
  }
};

/// Reduces `body(acc, begin, end)` over [0, n) in chunks of `chunk_size`.
/// `Acc` must be default-constructible and provide merge().
template <class Acc, class Body>
Acc reduce_chunks_serial(std::uint64_t n, std::uint64_t chunk_size, Body&& body) {
  Acc total{};
  for (std::uint64_t begin = 0; begin < n; begin += chunk_size) {
    Acc partial{};
    body(partial, begin, std::min(n, begin + chunk_size));
    total.merge(partial);
  }
  return total;
}

template <class Acc, class Body>
Acc reduce_chunks_parallel(std::uint64_t n, std::uint64_t chunk_size, Body&& body) {
  const std::uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Acc> partials(n_chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
    body(partials[static_cast<std::size_t>(c)], begin, std::min(n, begin + chunk_size));
  }
  Acc total{};
  for (const Acc& partial : partials) total.merge(partial);
  return total;
}

template <class Acc, class Body>
Acc reduce_chunks(const McConfig& cfg, Body&& body) {
  cfg.validate();
  if (cfg.execution == Execution::serial)
    return reduce_chunks_serial<Acc>(cfg.n_trajectories, cfg.chunk_size, body);
  return reduce_chunks_parallel<Acc>(cfg.n_trajectories, cfg.chunk_size, body);
}

}  // namespace cpf
