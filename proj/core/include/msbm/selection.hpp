#pragma once

#include "msbm/graph.hpp"
#include "msbm/vem.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msbm {

/// 0.5 * { P_Q log(K n (n-1)) + (Q-1) log n } with P_Q = Q^2 (2^K - 1)(1 + d); natural log.
double icl_penalty(int Q, int K, std::size_t n, std::size_t d = 0);

/// Completed log-likelihood at the MAP assignment of the fit, minus icl_penalty(Q, K, n).
double icl(const MultiplexGraph& g, const FitResult& fit);

/// Covariate variant: penalty uses the dimension of (mu, beta).
double icl_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const CovariateFitResult& fit);

struct IclRecord
{
    int Q = 1;
    bool ok = false;
    std::string error;
    double best_elbo = 0.0;
    double completed_loglik = 0.0;
    double penalty = 0.0;
    double icl = 0.0;
    bool converged = false;
    std::vector<std::string> flags;
};

struct IclReport
{
    std::vector<IclRecord> records; // ascending Q
    int selected_q = 0;             // 0 when every candidate failed
    std::vector<std::string> warnings;
    std::vector<FitResult> fits;    // one per successful record, same order
};

/// ICL values closer than this are treated as ties; the smaller Q wins.
inline constexpr double kIclTieTolerance = 1e-9;

/// Fits every candidate Q and selects the ICL maximiser.
IclReport select_q(const MultiplexGraph& g, std::span<const int> candidates, const FitConfig& config = {});

} // namespace msbm
