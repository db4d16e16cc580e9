#pragma once

#include "msbm/model.hpp"
#include "msbm/vem.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace msbm {

struct LabConfig
{
    BlockParameters truth;
    std::vector<std::size_t> n_grid;
    int replications = 20;
    std::uint64_t seed = 0;
    FitConfig fit;
    double zeta = 0.01;  // entries of pi must be 0, 1 or inside [zeta, 1 - zeta]
    double gamma = 0.01; // alpha_q must lie in [gamma, 1 - gamma]
    double identifiability_tol = 1e-6;
};

struct LabPreconditions
{
    bool ok = true;
    IdentifiabilityReport identifiability;
    std::vector<std::string> violations;
};

/// Identifiability plus the three consistency assumptions (distinct blocks, bounded pi, bounded alpha).
LabPreconditions check_lab_preconditions(const BlockParameters& truth, double zeta = 0.01, double gamma = 0.01,
                                         double tol = 1e-6);

struct LabRow
{
    std::size_t n = 0;
    int replication = 0;
    bool ok = false;
    double err_pi = 0.0;
    double err_alpha = 0.0;
    double ari = 0.0;
    bool elbo_monotone = false; // trace never dropped by more than 1e-8
    std::string error;
};

struct LabSummary
{
    std::size_t n = 0;
    double median_err_pi = 0.0;
    double median_err_alpha = 0.0;
    int failures = 0;
};

struct LabTable
{
    LabPreconditions preconditions;
    std::vector<LabRow> rows;       // grid-major, then replication
    std::vector<LabSummary> summary; // one per grid point
};

/**
 * Simulates from the truth at each n, fits with the same Q, aligns labels and
 * records sup-norm errors on pi and alpha. Returns without running when the
 * preconditions fail.
 */
LabTable error_vs_n(const LabConfig& config);

double median(std::vector<double> values);

} // namespace msbm
