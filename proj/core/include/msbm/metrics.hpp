#pragma once

#include "msbm/model.hpp"

#include <span>
#include <vector>

namespace msbm {

/// Adjusted Rand index between two labelings (Hubert & Arabie). 1 when both are a single cluster.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Minimum-cost assignment on a square cost matrix (row-major); returns column per row.
std::vector<int> hungarian(std::span<const double> cost, int size);

struct Alignment
{
    std::vector<int> perm; // estimated block q corresponds to true block perm[q]
    double err_pi = 0.0;   // max |pi_hat - pi*| after relabeling
    double err_alpha = 0.0;
};

/**
 * Aligns estimated blocks to the truth, minimising the sup-norm distance on pi.
 * Exhaustive over permutations for Q <= 8, Hungarian matching on block
 * profiles above that.
 */
Alignment align_blocks(const BlockParameters& estimate, const BlockParameters& truth);

/// Sup-norm distance between two parameter sets after applying perm to the estimate.
double pi_distance(const BlockParameters& estimate, const BlockParameters& truth, std::span<const int> perm);

} // namespace msbm
