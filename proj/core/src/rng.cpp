#include "msbm/rng.hpp"

#include <cmath>

namespace msbm {

namespace philox {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void round(Counter& c, const Key& k) noexcept
{
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

Counter block(Counter counter, Key key) noexcept
{
    for (int r = 0; r < 10; ++r) {
        round(counter, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return counter;
}

} // namespace philox

namespace {

inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

philox::Counter make_counter(Stream stream, std::uint64_t index, std::uint32_t draw) noexcept
{
    return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), draw,
            static_cast<std::uint32_t>(stream)};
}

} // namespace

double counter_uniform(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t draw) noexcept
{
    const auto out = philox::block(make_counter(stream, index, draw), philox::key_from_seed(seed));
    return to_unit(out[0], out[1]);
}

std::array<double, 2> counter_uniform2(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t draw) noexcept
{
    const auto out = philox::block(make_counter(stream, index, draw), philox::key_from_seed(seed));
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

std::size_t sample_categorical(std::span<const double> probs, double u) noexcept
{
    double total = 0.0;
    for (double p : probs) total += p;
    const double target = u * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] <= 0.0) continue;
        last_positive = k;
        cum += probs[k];
        if (target < cum) return k;
    }
    return last_positive;
}

PhiloxEngine::PhiloxEngine(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept
    : key_{philox::key_from_seed(seed)}, counter_{make_counter(stream, index, 0)}
{
}

PhiloxEngine::result_type PhiloxEngine::operator()() noexcept
{
    if (available_ == 0) {
        buffer_ = philox::block(counter_, key_);
        ++counter_[2];
        available_ = 2;
    }
    const int at = 2 - available_;
    --available_;
    return (static_cast<std::uint64_t>(buffer_[2 * at]) << 32) | buffer_[2 * at + 1];
}

double PhiloxEngine::uniform() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double PhiloxEngine::uniform_open() noexcept
{
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double PhiloxEngine::exponential() noexcept
{
    return -std::log(uniform_open());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace msbm
