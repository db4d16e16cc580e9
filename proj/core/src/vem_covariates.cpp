#include "msbm/vem.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msbm {

namespace {

const double kLogFloor = std::log(kProbFloor);
const double kLogCeil = std::log1p(-kProbFloor);

void check_shapes(const MultiplexGraph& g, const EdgeCovariates& cov, const CovariateBlockParameters& theta)
{
    if (cov.size() != g.size()) throw DimensionError("covariates and graph disagree on n");
    if (cov.dim() != theta.d) throw DimensionError("covariates and parameters disagree on d");
    if (theta.K != g.layers()) throw DimensionError("parameters and graph disagree on K");
    if (theta.alpha.size() != static_cast<std::size_t>(theta.Q)
        || theta.cells.size() != static_cast<std::size_t>(theta.Q) * theta.Q)
        throw DimensionError("covariate block parameters have the wrong size");
}

/// table[(i*n + j)*Q*Q + q*Q + l] = log P(X_ij | Z_i = q, Z_j = l, y_ij), clamped like clamped_log.
std::vector<double> observed_log_probs(const MultiplexGraph& g, const EdgeCovariates& cov,
                                       const CovariateBlockParameters& theta)
{
    const auto n = g.size();
    const auto QQ = static_cast<std::size_t>(theta.Q) * theta.Q;
    std::vector<double> table(n * n * QQ, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto w = g.word(i, j);
            double* dst = table.data() + (i * n + j) * QQ;
            for (std::size_t c = 0; c < QQ; ++c) {
                const auto lp = er_word_log_prob(theta.cells[c], cov.at(i, j));
                dst[c] = std::clamp(lp[w], kLogFloor, kLogCeil);
            }
        }
    return table;
}

double prior_and_entropy(const VariationalPosterior& tau, std::span<const double> alpha)
{
    double total = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i)
        for (int q = 0; q < tau.blocks(); ++q) {
            const double t = tau(i, q);
            if (t > 0.0) total += t * clamped_log(alpha[q]) - x_log_x(t);
        }
    return total;
}

double elbo_from_table(const VariationalPosterior& tau, std::span<const double> table, std::span<const double> alpha)
{
    const auto n = tau.size();
    const int Q = tau.blocks();
    const auto QQ = static_cast<std::size_t>(Q) * Q;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double* lp = table.data() + (i * n + j) * QQ;
            for (int q = 0; q < Q; ++q) {
                const double tiq = tau(i, q);
                if (tiq == 0.0) continue;
                for (int l = 0; l < Q; ++l) total += tiq * tau(j, l) * lp[q * Q + l];
            }
        }
    return total + prior_and_entropy(tau, alpha);
}

} // namespace

CovariateMStepResult m_step_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const VariationalPosterior& tau,
                                       const GlmConfig& config, bool intercept_only, const CovariateBlockParameters* start)
{
    if (tau.size() != g.size() || cov.size() != g.size()) throw DimensionError("m_step_covariates: node counts disagree");
    const int Q = tau.blocks();
    const auto n = g.size();
    const auto d = cov.dim();

    CovariateMStepResult result{CovariateBlockParameters(Q, g.layers(), d), std::vector<bool>(static_cast<std::size_t>(Q) * Q, false)};
    auto& theta = result.theta;
    for (int q = 0; q < Q; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += tau(i, q);
        theta.alpha[q] = s / static_cast<double>(n);
    }

    const auto table = make_pair_table(g, &cov);
    std::vector<double> weights(table.words.size());
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l) {
            for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = tau(table.src[r], q) * tau(table.dst[r], l);
            const LogitData intercept_data{g.layers(), 0, table.words, {}, weights};
            auto intercept_fit = [&]() {
                CovariateModel m(g.layers(), d);
                try {
                    m.mu = fit_multinomial_logit(intercept_data, config).model.mu;
                } catch (const GlmConvergenceError& e) {
                    m.mu = e.last_iterate().model.mu;
                }
                return m;
            };

            auto& cell = theta.cell(q, l);
            if (intercept_only || d == 0) {
                cell = intercept_fit();
                continue;
            }
            const LogitData data{g.layers(), d, table.words, table.covariates, weights};
            std::optional<CovariateModel> init;
            if (start) init = start->cell(q, l);
            try {
                cell = fit_multinomial_logit(data, config, init).model;
            } catch (const GlmConvergenceError&) {
                cell = intercept_fit();
                result.fallback[static_cast<std::size_t>(q) * Q + l] = true;
            }
        }
    return result;
}

double complete_log_likelihood_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, std::span<const int> z,
                                          const CovariateBlockParameters& theta)
{
    check_shapes(g, cov, theta);
    const auto n = g.size();
    if (z.size() != n) throw DimensionError("assignment length differs from node count");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] < 0 || z[i] >= theta.Q) throw DimensionError("assignment label outside [0, Q)");
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto lp = er_word_log_prob(theta.cell(z[i], z[j]), cov.at(i, j));
            total += std::clamp(lp[g.word(i, j)], kLogFloor, kLogCeil);
        }
        total += clamped_log(theta.alpha[z[i]]);
    }
    return total;
}

double elbo_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const VariationalPosterior& tau,
                       const CovariateBlockParameters& theta)
{
    check_shapes(g, cov, theta);
    if (tau.size() != g.size() || tau.blocks() != theta.Q) throw DimensionError("tau shape does not match");
    return elbo_from_table(tau, observed_log_probs(g, cov, theta), theta.alpha);
}

EStepResult e_step_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const CovariateBlockParameters& theta,
                              const VariationalPosterior& tau_init, const FitConfig& config)
{
    check_shapes(g, cov, theta);
    if (tau_init.size() != g.size() || tau_init.blocks() != theta.Q) throw DimensionError("tau shape does not match");
    const auto n = g.size();
    const int Q = theta.Q;
    const auto QQ = static_cast<std::size_t>(Q) * Q;

    EStepResult result{tau_init, false, 0, 0.0};
    if (Q == 1) {
        result.tau = VariationalPosterior(n, 1);
        result.converged = true;
        return result;
    }
    const auto table = observed_log_probs(g, cov, theta);
    std::vector<double> logits(static_cast<std::size_t>(Q));
    auto& tau = result.tau;
    for (int it = 0; it < config.fixed_point_max; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (int q = 0; q < Q; ++q) logits[q] = clamped_log(theta.alpha[q]);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double* out = table.data() + (i * n + j) * QQ;
                const double* in = table.data() + (j * n + i) * QQ;
                for (int q = 0; q < Q; ++q)
                    for (int l = 0; l < Q; ++l) logits[q] += tau(j, l) * (out[q * Q + l] + in[l * Q + q]);
            }
            const double top = *std::max_element(logits.begin(), logits.end());
            double sum = 0.0;
            for (auto& v : logits) {
                v = std::exp(v - top);
                sum += v;
            }
            auto ti = tau.row(i);
            double damped_sum = 0.0;
            for (int q = 0; q < Q; ++q) {
                logits[q] = (1.0 - config.damping) * logits[q] / sum + config.damping * ti[q];
                damped_sum += logits[q];
            }
            for (int q = 0; q < Q; ++q) {
                const double v = logits[q] / damped_sum;
                change = std::max(change, std::abs(v - ti[q]));
                ti[q] = v;
            }
        }
        result.iterations = it + 1;
        result.last_change = change;
        if (change < config.fixed_point_tol) {
            result.converged = true;
            break;
        }
    }
    if (elbo_from_table(result.tau, table, theta.alpha) < elbo_from_table(tau_init, table, theta.alpha) - 1e-8)
        result.tau = tau_init;
    return result;
}

CovariateFitResult fit_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, int Q, const FitConfig& config,
                                  const GlmConfig& glm)
{
    config.validate();
    if (cov.size() != g.size()) throw DimensionError("covariates and graph disagree on n");

    CovariateFitResult result;
    result.Q = Q;
    result.seed = config.seed;
    result.tau = fit(g, Q, config).tau;

    auto note = [&](const CovariateMStepResult& step) {
        if (std::any_of(step.fallback.begin(), step.fallback.end(), [](bool b) { return b; })) {
            const std::string flag = "covariate cell fell back to intercept-only";
            if (std::find(result.flags.begin(), result.flags.end(), flag) == result.flags.end()) result.flags.push_back(flag);
        }
    };

    auto step = m_step_covariates(g, cov, result.tau, glm);
    note(step);
    result.theta = std::move(step.theta);
    result.elbo_trace.push_back(elbo_covariates(g, cov, result.tau, result.theta));

    if (Q == 1) {
        result.converged = true;
    } else {
        for (int t = 0; t < config.max_outer; ++t) {
            auto es = e_step_covariates(g, cov, result.theta, result.tau, config);
            result.tau = std::move(es.tau);
            auto next = m_step_covariates(g, cov, result.tau, glm, false, &result.theta);
            note(next);
            result.theta = std::move(next.theta);
            const double previous = result.elbo_trace.back();
            const double current = elbo_covariates(g, cov, result.tau, result.theta);
            result.elbo_trace.push_back(current);
            if (current - previous <= config.elbo_rel_tol * std::abs(previous)) {
                result.converged = true;
                break;
            }
        }
    }
    if (!result.converged) result.flags.push_back("max outer iterations reached");
    result.map = result.tau.map_assignment();
    return result;
}

} // namespace msbm
