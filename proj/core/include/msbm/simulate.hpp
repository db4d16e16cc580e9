#pragma once

#include "msbm/er.hpp"
#include "msbm/graph.hpp"
#include "msbm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace msbm {

struct SbmSample
{
    MultiplexGraph graph;
    Assignment truth; // 0-based labels
};


/// Uniform alpha and pi cells drawn from Dirichlet(1, ..., 1).
BlockParameters random_block_parameters(int Q, int K, std::uint64_t seed);

/// Word of pair (i, j) drawn i.i.d. from pi; bit-identical for identical seeds.
MultiplexGraph sample_er(const ErParameters& er, std::size_t n, std::uint64_t seed);

/// Labels i.i.d. from alpha, then words from pi_{z_i z_j}.
SbmSample sample_sbm(const BlockParameters& theta, std::size_t n, std::uint64_t seed);

/// Labels i.i.d. from alpha (uses the same counter lane as sample_sbm).
Assignment sample_labels(std::span<const double> alpha, std::size_t n, std::uint64_t seed);

/// Standard-normal covariates, i.i.d. per ordered pair and dimension (Box-Muller).
EdgeCovariates sample_covariates(std::size_t n, std::size_t d, std::uint64_t seed);

MultiplexGraph sample_er_covariates(const CovariateModel& model, const EdgeCovariates& cov, std::uint64_t seed);

SbmSample sample_sbm_covariates(const CovariateBlockParameters& theta, const EdgeCovariates& cov, std::uint64_t seed);

} // namespace msbm
