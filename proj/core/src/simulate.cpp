#include "msbm/simulate.hpp"

#include "msbm/error.hpp"
#include "msbm/rng.hpp"

#include <cmath>
#include <numbers>

namespace msbm {

namespace {

template <typename CellOf>
MultiplexGraph sample_words(std::size_t n, int K, std::uint64_t seed, CellOf&& cell_of)
{
    std::vector<Word> words(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double u = counter_uniform(seed, Stream::pair_word, i * n + j, 0);
            words[i * n + j] = static_cast<Word>(sample_categorical(cell_of(i, j), u));
        }
    return MultiplexGraph(n, K, std::move(words));
}

void check_simplex(std::span<const double> p, const char* what)
{
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw InputError(std::string(what) + " has a negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw InputError(std::string(what) + " does not sum to 1");
}

} // namespace

BlockParameters random_block_parameters(int Q, int K, std::uint64_t seed)
{
    BlockParameters theta(Q, K);
    for (int c = 0; c < Q * Q; ++c) {
        PhiloxEngine rng(seed, Stream::parameters, static_cast<std::uint64_t>(c));
        auto cell = theta.cell(c / Q, c % Q);
        double sum = 0.0;
        for (double& p : cell) sum += (p = rng.exponential());
        for (double& p : cell) p /= sum;
    }
    return theta;
}

MultiplexGraph sample_er(const ErParameters& er, std::size_t n, std::uint64_t seed)
{
    if (er.pi.size() != (std::size_t{1} << er.K)) throw DimensionError("ER pi must have 2^K entries");
    check_simplex(er.pi, "ER pi");
    const std::span<const double> pi = er.pi;
    return sample_words(n, er.K, seed, [&](std::size_t, std::size_t) { return pi; });
}

Assignment sample_labels(std::span<const double> alpha, std::size_t n, std::uint64_t seed)
{
    Assignment z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = static_cast<int>(sample_categorical(alpha, counter_uniform(seed, Stream::block_label, i, 0)));
    return z;
}

SbmSample sample_sbm(const BlockParameters& theta, std::size_t n, std::uint64_t seed)
{
    theta.validate();
    auto z = sample_labels(theta.alpha, n, seed);
    auto g = sample_words(n, theta.K, seed, [&](std::size_t i, std::size_t j) { return theta.cell(z[i], z[j]); });
    return {std::move(g), std::move(z)};
}

EdgeCovariates sample_covariates(std::size_t n, std::size_t d, std::uint64_t seed)
{
    EdgeCovariates cov(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            auto y = cov.at(i, j);
            for (std::size_t k = 0; k < d; k += 2) {
                auto [u1, u2] = counter_uniform2(seed, Stream::covariate, i * n + j, static_cast<std::uint32_t>(k));
                const double radius = std::sqrt(-2.0 * std::log1p(-u1)); // 1 - u1 in (0, 1]
                const double angle = 2.0 * std::numbers::pi * u2;
                y[k] = radius * std::cos(angle);
                if (k + 1 < d) y[k + 1] = radius * std::sin(angle);
            }
        }
    return cov;
}

MultiplexGraph sample_er_covariates(const CovariateModel& model, const EdgeCovariates& cov, std::uint64_t seed)
{
    if (cov.dim() != model.d) throw DimensionError("covariate dimension differs from model");
    std::vector<double> p;
    return sample_words(cov.size(), model.K, seed, [&](std::size_t i, std::size_t j) {
        p = er_word_prob(model, cov.at(i, j));
        return std::span<const double>(p);
    });
}

SbmSample sample_sbm_covariates(const CovariateBlockParameters& theta, const EdgeCovariates& cov, std::uint64_t seed)
{
    if (cov.dim() != theta.d) throw DimensionError("covariate dimension differs from model");
    check_simplex(theta.alpha, "alpha");
    auto z = sample_labels(theta.alpha, cov.size(), seed);
    std::vector<double> p;
    auto g = sample_words(cov.size(), theta.K, seed, [&](std::size_t i, std::size_t j) {
        p = er_word_prob(theta.cell(z[i], z[j]), cov.at(i, j));
        return std::span<const double>(p);
    });
    return {std::move(g), std::move(z)};
}

} // namespace msbm
