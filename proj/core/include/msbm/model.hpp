#pragma once

#include "msbm/graph.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msbm {

/// Probabilities entering a logarithm are clamped into [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-12;

double clamped_log(double p) noexcept;

/// x log x with the 0 log 0 = 0 convention.
double x_log_x(double x) noexcept;

/// Block label per node, 0-based internally (serialised 1-based).
using Assignment = std::vector<int>;

/**
 * SBM parameters: block proportions alpha (length Q) and, for each ordered
 * block pair (q, l), a distribution over the 2^K edge words.
 */
struct BlockParameters
{
    int Q = 1;
    int K = 1;
    std::vector<double> alpha;
    std::vector<double> pi; // index ((q * Q) + l) * 2^K + w

    BlockParameters() = default;
    BlockParameters(int blocks, int layers);

    std::size_t num_words() const noexcept { return std::size_t{1} << K; }

    double& prob(int q, int l, std::size_t w) noexcept { return pi[(static_cast<std::size_t>(q) * Q + l) * num_words() + w]; }
    double prob(int q, int l, std::size_t w) const noexcept { return pi[(static_cast<std::size_t>(q) * Q + l) * num_words() + w]; }

    std::span<double> cell(int q, int l) noexcept { return {pi.data() + (static_cast<std::size_t>(q) * Q + l) * num_words(), num_words()}; }
    std::span<const double> cell(int q, int l) const noexcept { return {pi.data() + (static_cast<std::size_t>(q) * Q + l) * num_words(), num_words()}; }

    /// Throws InputError unless alpha and every pi cell lie on the simplex within `tol`.
    void validate(double tol = 1e-10) const;

    /// Relabels blocks: block q of this parameter set becomes block perm[q].
    BlockParameters permuted(std::span<const int> perm) const;
};

double complete_log_likelihood(const MultiplexGraph& g, std::span<const int> z, const BlockParameters& theta);

/// P(X^k = 1) for a single word distribution; `layer` is 1-based.
double marginal_layer_prob(std::span<const double> cell, int layer);

struct LayerValue
{
    int layer; // 1-based
    int value; // 0 or 1
};

/// P(X^layer = value | given), computed as a ratio of word-mass sums.
double conditional_layer_prob(std::span<const double> cell, int layer, int value, std::span<const LayerValue> given);

/// For K = 2: |pi(00) pi(11) - pi(10) pi(01)| <= tol.
bool is_independent(std::span<const double> cell, double tol = 1e-9);

/// (2^K - 1) Q^2 + (Q - 1).
long long count_parameters(int Q, int K);

struct IdentifiabilityCollision
{
    std::size_t word;
    int q1;
    int q2;
    double gap;
};

struct IdentifiabilityReport
{
    bool pass = true;
    std::vector<int> small_alpha;              // blocks with alpha_q <= tol
    std::vector<IdentifiabilityCollision> collisions;
    std::vector<std::vector<double>> r;        // r[w][q] = sum_l pi_ql(w) alpha_l

    std::string summary() const;
};

/// Checks positivity of alpha and distinctness of the coordinates of r(w) = pi(w) alpha for every word.
IdentifiabilityReport check_identifiability(const BlockParameters& theta, double tol = 1e-6);

} // namespace msbm
