#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cpf {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is addressed by (seed, stream index, domain); any stream can be
/// regenerated in isolation, so per-trajectory streams need no coordination
/// between workers. Satisfies UniformRandomBitGenerator with 64-bit output.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  /// Domains separate independent uses of the same (seed, index).
  enum class Domain : std::uint32_t { trajectory = 0, bootstrap = 1, ensemble = 2, test = 3 };

  CounterRng(std::uint64_t seed, std::uint64_t stream, Domain domain = Domain::trajectory) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform_open() noexcept;

  /// Raw Philox block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int cursor_ = 2;  // in 64-bit words; 2 means empty
};

}  // namespace cpf
