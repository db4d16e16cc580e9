#pragma once

#include "msbm/error.hpp"
#include "msbm/graph.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msbm {

/// Multiplex Erdos-Renyi model: one word distribution shared by every ordered pair.
struct ErParameters
{
    int K = 1;
    std::vector<double> pi;
};

/**
 * Multinomial-logit word model with the all-zeros word as base category.
 * Word v >= 1 has linear predictor mu[v-1] + beta[v-1]^T y.
 */
struct CovariateModel
{
    int K = 1;
    std::size_t d = 0;
    std::vector<double> mu;   // 2^K - 1 entries
    std::vector<double> beta; // (2^K - 1) * d, row-major by word

    CovariateModel() = default;
    CovariateModel(int layers, std::size_t dim);

    std::size_t num_free_words() const noexcept { return (std::size_t{1} << K) - 1; }
    std::size_t num_coefficients() const noexcept { return num_free_words() * (1 + d); }

    double& coef(std::size_t v, std::size_t k) noexcept { return beta[v * d + k]; }
    double coef(std::size_t v, std::size_t k) const noexcept { return beta[v * d + k]; }
};

/// Closed-form MLE: word frequencies over the n(n-1) ordered pairs.
ErParameters fit_er(const MultiplexGraph& g);

/// Word distribution under the covariate model for covariate vector y.
std::vector<double> er_word_prob(const CovariateModel& model, std::span<const double> y);

/// Log of er_word_prob, computed with a max shift.
std::vector<double> er_word_log_prob(const CovariateModel& model, std::span<const double> y);

struct GlmConfig
{
    int max_iterations = 100;
    double gradient_tolerance = 1e-8;
    int max_halvings = 30;
    double separation_cap = 30.0;
};

struct GlmFit
{
    CovariateModel model;
    std::vector<double> std_errors;     // observed-information SEs, layout [mu_v, beta_v...] per word
    std::vector<double> loglik_trace;   // one entry per accepted iterate, starting with the initial point
    double log_likelihood = 0.0;
    double gradient_norm = 0.0;         // infinity norm at the returned iterate
    int iterations = 0;
    bool converged = false;
    bool separation_warning = false;

    double std_error_mu(std::size_t v) const { return std_errors[v * (1 + model.d)]; }
    double std_error_beta(std::size_t v, std::size_t k) const { return std_errors[v * (1 + model.d) + 1 + k]; }
};

/// Raised when Newton-Raphson exhausts its iteration budget; carries the last iterate.
class GlmConvergenceError : public Error
{
public:
    GlmConvergenceError(const std::string& what, GlmFit last) : Error(what), last_(std::move(last)) {}
    const GlmFit& last_iterate() const noexcept { return last_; }

private:
    GlmFit last_;
};

/**
 * Weighted multinomial-logit observations. Row r has word words[r], covariates
 * covariates[r*d .. r*d+d) and weight weights[r] (all ones when empty).
 */
struct LogitData
{
    int K = 1;
    std::size_t d = 0;
    std::span<const Word> words;
    std::span<const double> covariates;
    std::span<const double> weights;
};

/// Newton-Raphson with step halving on the concatenated (mu, beta).
GlmFit fit_multinomial_logit(const LogitData& data, const GlmConfig& config = {},
                             const std::optional<CovariateModel>& start = std::nullopt);

double multinomial_log_likelihood(const LogitData& data, const CovariateModel& model);

/// Maximises sum_{i != j} log P(word(i,j) | y_ij) over (mu, beta).
GlmFit fit_er_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const GlmConfig& config = {});

/// Flattens the off-diagonal pairs of (g, cov) in row-major (i, j) order.
struct PairTable
{
    std::vector<Word> words;
    std::vector<double> covariates;
    std::vector<std::size_t> src;
    std::vector<std::size_t> dst;
};
PairTable make_pair_table(const MultiplexGraph& g, const EdgeCovariates* cov);

/// Block parameters with covariate-driven word distributions per cell.
struct CovariateBlockParameters
{
    int Q = 1;
    int K = 1;
    std::size_t d = 0;
    std::vector<double> alpha;
    std::vector<CovariateModel> cells; // index q * Q + l

    CovariateBlockParameters() = default;
    CovariateBlockParameters(int blocks, int layers, std::size_t dim);

    const CovariateModel& cell(int q, int l) const { return cells[static_cast<std::size_t>(q) * Q + l]; }
    CovariateModel& cell(int q, int l) { return cells[static_cast<std::size_t>(q) * Q + l]; }
};

} // namespace msbm
