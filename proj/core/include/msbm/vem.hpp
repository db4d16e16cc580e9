#pragma once

#include "msbm/er.hpp"
#include "msbm/graph.hpp"
#include "msbm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace msbm {

/// Mean-field posterior: row i is a distribution over the Q blocks for node i.
class VariationalPosterior
{
public:
    VariationalPosterior() = default;
    /// Uniform rows.
    VariationalPosterior(std::size_t nodes, int blocks);
    VariationalPosterior(std::size_t nodes, int blocks, std::vector<double> values);

    /// Hard posterior: weight `confidence` on the given label, the rest spread evenly.
    static VariationalPosterior from_assignment(std::span<const int> z, int blocks, double confidence = 1.0);

    std::size_t size() const noexcept { return n_; }
    int blocks() const noexcept { return Q_; }

    double operator()(std::size_t i, int q) const noexcept { return tau_[i * Q_ + q]; }
    double& operator()(std::size_t i, int q) noexcept { return tau_[i * Q_ + q]; }

    std::span<const double> row(std::size_t i) const noexcept { return {tau_.data() + i * Q_, static_cast<std::size_t>(Q_)}; }
    std::span<double> row(std::size_t i) noexcept { return {tau_.data() + i * Q_, static_cast<std::size_t>(Q_)}; }
    std::span<const double> values() const noexcept { return tau_; }

    /// Row-wise argmax, ties resolved towards the smaller block index.
    Assignment map_assignment() const;

    /// Throws InputError unless every row lies on the simplex within `tol`.
    void validate(double tol = 1e-10) const;

    /// Node i of this posterior becomes node perm[i].
    VariationalPosterior permuted_nodes(std::span<const std::size_t> perm) const;
    /// Block q becomes block perm[q].
    VariationalPosterior permuted_blocks(std::span<const int> perm) const;

private:
    std::size_t n_ = 0;
    int Q_ = 0;
    std::vector<double> tau_;
};

enum class InitStrategy
{
    spectral_then_random, // restart 0 spectral, the others random
    spectral,
    random,
};

std::string to_string(InitStrategy s);
InitStrategy parse_init_strategy(const std::string& s);

struct FitConfig
{
    int max_outer = 500;
    int fixed_point_max = 200;
    double fixed_point_tol = 1e-6;
    double elbo_rel_tol = 1e-8;
    double damping = 0.0;
    int restarts = 10;
    InitStrategy init = InitStrategy::spectral_then_random;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct EStepResult
{
    VariationalPosterior tau;
    bool converged = false;
    int iterations = 0;
    double last_change = 0.0;
};

struct MStepResult
{
    BlockParameters theta;
    std::vector<std::pair<int, int>> empty_cells; // set to uniform
};

struct FitResult
{
    int Q = 1;
    BlockParameters theta;
    VariationalPosterior tau;
    std::vector<double> elbo_trace;
    bool converged = false;
    Assignment map;
    std::vector<std::string> flags;
    std::uint64_t seed = 0;
    int restart = 0;
    std::vector<double> restart_elbos;
    double wall_seconds = 0.0;

    double elbo() const { return elbo_trace.empty() ? 0.0 : elbo_trace.back(); }
};

/**
 * Variational lower bound
 *   sum_{i != j} sum_{q,l} tau_iq tau_jl log pi_ql(X_ij) + sum_{i,q} tau_iq (log alpha_q - log tau_iq).
 */
double elbo(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta);

/**
 * Fixed-point update of tau for fixed theta. Nodes are updated in place one
 * at a time; each node update maximises the bound in that row, so the
 * bound never decreases. Both the outgoing and the incoming pair of every
 * ordered pair contribute to the node's log-weights.
 */
EStepResult e_step(const MultiplexGraph& g, const BlockParameters& theta, const VariationalPosterior& tau_init,
                   const FitConfig& config = {});

/// Closed-form maximiser of the bound in theta for fixed tau.
MStepResult m_step(const MultiplexGraph& g, const VariationalPosterior& tau);

/// Starting posterior for one restart.
VariationalPosterior initial_posterior(const MultiplexGraph& g, int Q, const FitConfig& config, int restart);

/// Spectral clustering of the symmetrised layer sum; returns hard labels.
Assignment spectral_labels(const MultiplexGraph& g, int Q, std::uint64_t seed);

/// One variational EM run from a given starting posterior.
FitResult fit_from(const MultiplexGraph& g, const VariationalPosterior& tau_init, const FitConfig& config);

/// Best-of-restarts variational EM.
FitResult fit(const MultiplexGraph& g, int Q, const FitConfig& config = {});

// Covariate SBM -------------------------------------------------------------

struct CovariateMStepResult
{
    CovariateBlockParameters theta;
    std::vector<bool> fallback; // per cell: Newton failed, intercept-only fit used
};

/// Weighted multinomial-logit fit per block pair with weights tau_iq tau_jl.
CovariateMStepResult m_step_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const VariationalPosterior& tau,
                                       const GlmConfig& config = {}, bool intercept_only = false,
                                       const CovariateBlockParameters* start = nullptr);

double complete_log_likelihood_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, std::span<const int> z,
                                          const CovariateBlockParameters& theta);

double elbo_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const VariationalPosterior& tau,
                       const CovariateBlockParameters& theta);

EStepResult e_step_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const CovariateBlockParameters& theta,
                              const VariationalPosterior& tau_init, const FitConfig& config = {});

struct CovariateFitResult
{
    int Q = 1;
    CovariateBlockParameters theta;
    VariationalPosterior tau;
    std::vector<double> elbo_trace;
    bool converged = false;
    Assignment map;
    std::vector<std::string> flags;
    std::uint64_t seed = 0;

    double elbo() const { return elbo_trace.empty() ? 0.0 : elbo_trace.back(); }
};

/// Variational EM for the covariate SBM, started from the plain SBM fit.
CovariateFitResult fit_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, int Q, const FitConfig& config = {},
                                  const GlmConfig& glm = {});

} // namespace msbm
