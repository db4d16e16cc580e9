#pragma once

#include "msbm/graph.hpp"
#include "msbm/model.hpp"
#include "msbm/vem.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace msbm {

/// Assignment-space limits for brute-force enumeration.
inline constexpr std::uint64_t kMaxLikelihoodAssignments = 10'000'000;
inline constexpr std::uint64_t kMaxPosteriorAssignments = 1'000'000;

/// Q^n, saturating at UINT64_MAX.
std::uint64_t assignment_count(int Q, std::size_t n) noexcept;

/// log sum_z exp(complete_log_likelihood(g, z, theta)) by exhaustive enumeration.
double exact_log_likelihood(const MultiplexGraph& g, const BlockParameters& theta);

struct ExactPosterior
{
    int Q = 1;
    std::size_t n = 0;
    double log_likelihood = 0.0;
    std::vector<double> probs;     // index sum_i z_i Q^i (node 0 is the least significant digit)
    std::vector<double> marginals; // n x Q, row-major

    double marginal(std::size_t i, int q) const { return marginals[i * static_cast<std::size_t>(Q) + q]; }
    Assignment decode(std::uint64_t index) const;
    std::uint64_t mode() const;
};

ExactPosterior exact_posterior(const MultiplexGraph& g, const BlockParameters& theta);

struct KlCheck
{
    double elbo = 0.0;
    double log_likelihood = 0.0;
    double kl = 0.0;
    double residual = 0.0; // |log_likelihood - elbo - kl|
};

/// Verifies log L = ELBO + KL(R_tau || p(. | X; theta)) on an enumerable instance.
KlCheck kl_decomposition_check(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta);

} // namespace msbm
