#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace msbm {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * Every random quantity in the library is addressed by a 128-bit counter
 * (index_lo, index_hi, draw, stream_tag) under a 64-bit key (the seed), so a
 * draw depends only on (seed, tag, index, draw) and never on evaluation order.
 * A block yields four 32-bit words; uniforms use the top 53 bits of the
 * 64-bit value (w0 << 32 | w1).
 */
namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter block(Counter counter, Key key) noexcept;

inline Key key_from_seed(std::uint64_t seed) noexcept
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

} // namespace philox

/// Stream tags; part of the documented counter layout.
enum class Stream : std::uint32_t
{
    block_label = 1,  // index = node
    pair_word = 2,    // index = i * n + j
    covariate = 3,    // index = i * n + j, draw = 2 * (k / 2)
    restart_init = 4, // index = restart
    kmeans = 5,       // index = restart
    parameters = 6,   // index = cell, Q * Q for alpha
};

/// Uniform in [0, 1) addressed by (seed, stream, index, draw).
double counter_uniform(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t draw) noexcept;

/// Pair of independent uniforms from one Philox block.
std::array<double, 2> counter_uniform2(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t draw) noexcept;

/// Inverse-CDF categorical draw; never returns a zero-probability category.
std::size_t sample_categorical(std::span<const double> probs, double u) noexcept;

/**
 * Sequential view on one (seed, stream, index) counter lane, usable as a
 * UniformRandomBitGenerator. Successive calls advance the draw field.
 */
class PhiloxEngine
{
public:
    using result_type = std::uint64_t;

    PhiloxEngine(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    double uniform() noexcept;          // [0, 1)
    double uniform_open() noexcept;     // (0, 1)
    double exponential() noexcept;      // Exp(1)

private:
    philox::Key key_;
    philox::Counter counter_;
    philox::Counter buffer_{};
    int available_ = 0;
};

/// SplitMix64 finaliser; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

} // namespace msbm
