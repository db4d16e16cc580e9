#include "msbm/vem.hpp"

#include "detail.hpp"
#include "msbm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace msbm {

// VariationalPosterior ---------------------------------------------------------

VariationalPosterior::VariationalPosterior(std::size_t nodes, int blocks)
    : n_{nodes}, Q_{blocks}, tau_(nodes * static_cast<std::size_t>(blocks), 1.0 / blocks)
{
    if (blocks < 1) throw InputError("Q must be >= 1");
}

VariationalPosterior::VariationalPosterior(std::size_t nodes, int blocks, std::vector<double> values)
    : n_{nodes}, Q_{blocks}, tau_(std::move(values))
{
    if (blocks < 1) throw InputError("Q must be >= 1");
    if (tau_.size() != nodes * static_cast<std::size_t>(blocks)) throw DimensionError("tau must have n*Q entries");
}

VariationalPosterior VariationalPosterior::from_assignment(std::span<const int> z, int blocks, double confidence)
{
    VariationalPosterior tau(z.size(), blocks);
    const double rest = blocks > 1 ? (1.0 - confidence) / (blocks - 1) : 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] < 0 || z[i] >= blocks) throw InputError("label outside [0, Q)");
        for (int q = 0; q < blocks; ++q) tau(i, q) = (q == z[i]) ? (blocks > 1 ? confidence : 1.0) : rest;
    }
    return tau;
}

Assignment VariationalPosterior::map_assignment() const
{
    Assignment z(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto r = row(i);
        z[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return z;
}

void VariationalPosterior::validate(double tol) const
{
    for (std::size_t i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (double t : row(i)) {
            if (!(t >= 0.0 && t <= 1.0)) throw InputError("tau entry outside [0, 1] in row " + std::to_string(i));
            sum += t;
        }
        if (std::abs(sum - 1.0) > tol) throw InputError("tau row " + std::to_string(i) + " does not sum to 1");
    }
}

VariationalPosterior VariationalPosterior::permuted_nodes(std::span<const std::size_t> perm) const
{
    if (perm.size() != n_) throw DimensionError("node permutation has wrong length");
    VariationalPosterior out(n_, Q_);
    for (std::size_t i = 0; i < n_; ++i) std::copy(row(i).begin(), row(i).end(), out.row(perm[i]).begin());
    return out;
}

VariationalPosterior VariationalPosterior::permuted_blocks(std::span<const int> perm) const
{
    if (perm.size() != static_cast<std::size_t>(Q_)) throw DimensionError("block permutation has wrong length");
    VariationalPosterior out(n_, Q_);
    for (std::size_t i = 0; i < n_; ++i)
        for (int q = 0; q < Q_; ++q) out(i, perm[q]) = (*this)(i, q);
    return out;
}

std::string to_string(InitStrategy s)
{
    switch (s) {
    case InitStrategy::spectral_then_random: return "spectral+random";
    case InitStrategy::spectral: return "spectral";
    case InitStrategy::random: return "random";
    }
    return "unknown";
}

InitStrategy parse_init_strategy(const std::string& s)
{
    if (s == "spectral+random") return InitStrategy::spectral_then_random;
    if (s == "spectral") return InitStrategy::spectral;
    if (s == "random") return InitStrategy::random;
    throw InputError("unknown init strategy '" + s + "' (expected spectral+random, spectral or random)");
}

void FitConfig::validate() const
{
    if (max_outer < 1 || fixed_point_max < 1) throw InputError("iteration limits must be >= 1");
    if (!(fixed_point_tol > 0.0) || !(elbo_rel_tol > 0.0)) throw InputError("tolerances must be > 0");
    if (!(damping >= 0.0 && damping < 1.0)) throw InputError("damping must be in [0, 1)");
    if (restarts < 1) throw InputError("restart count must be >= 1");
}

// Sufficient statistics ---------------------------------------------------------

namespace {

void check_shapes(const MultiplexGraph& g, const VariationalPosterior& tau)
{
    if (tau.size() != g.size()) throw DimensionError("tau has " + std::to_string(tau.size()) + " rows, graph has "
                                                     + std::to_string(g.size()) + " nodes");
}

void check_shapes(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta)
{
    check_shapes(g, tau);
    if (tau.blocks() != theta.Q) throw DimensionError("tau and theta disagree on Q");
    if (theta.K != g.layers()) throw DimensionError("theta and graph disagree on K");
    if (theta.alpha.size() != static_cast<std::size_t>(theta.Q)
        || theta.pi.size() != static_cast<std::size_t>(theta.Q) * theta.Q * theta.num_words())
        throw DimensionError("theta arrays have the wrong size");
}

// counts[(q*Q + l)*W + w] = sum_{i != j, X_ij = w} tau_iq tau_jl
std::vector<double> pair_word_mass(const MultiplexGraph& g, const VariationalPosterior& tau)
{
    const auto n = g.size();
    const int Q = tau.blocks();
    const auto W = g.num_words();
    std::vector<double> counts(static_cast<std::size_t>(Q) * Q * W, 0.0);
    detail::WordAccumulator acc(W, Q);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.row(i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) acc.add(row[j], tau.row(j));
        const auto ti = tau.row(i);
        for (auto w : acc.touched()) {
            const double* s = acc.sums(w);
            for (int q = 0; q < Q; ++q) {
                if (ti[q] == 0.0) continue;
                for (int l = 0; l < Q; ++l) counts[(static_cast<std::size_t>(q) * Q + l) * W + w] += ti[q] * s[l];
            }
        }
        acc.clear();
    }
    return counts;
}

std::vector<double> log_table(const BlockParameters& theta)
{
    std::vector<double> logs(theta.pi.size());
    std::transform(theta.pi.begin(), theta.pi.end(), logs.begin(), clamped_log);
    return logs;
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

std::vector<Word> transposed_words(const MultiplexGraph& g)
{
    const auto n = g.size();
    std::vector<Word> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * n + i] = g.word(i, j);
    return t;
}

// Writes the softmax of `logits` into `out` (in place allowed).
void softmax(std::span<const double> logits, std::span<double> out)
{
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t q = 0; q < logits.size(); ++q) {
        out[q] = std::exp(logits[q] - top);
        sum += out[q];
    }
    for (auto& v : out) v /= sum;
}

} // namespace

double elbo(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta)
{
    check_shapes(g, tau, theta);
    const auto counts = pair_word_mass(g, tau);
    const auto logs = log_table(theta);
    double total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] != 0.0) total += counts[k] * logs[k];
    return total + prior_and_entropy(tau, theta.alpha);
}

EStepResult e_step(const MultiplexGraph& g, const BlockParameters& theta, const VariationalPosterior& tau_init,
                   const FitConfig& config)
{
    check_shapes(g, tau_init, theta);
    const auto n = g.size();
    const int Q = theta.Q;
    const auto W = g.num_words();

    EStepResult result{tau_init, false, 0, 0.0};
    if (Q == 1) {
        result.tau = VariationalPosterior(n, 1);
        result.converged = true;
        return result;
    }

    const auto logs = log_table(theta);
    std::vector<double> log_alpha(static_cast<std::size_t>(Q));
    std::transform(theta.alpha.begin(), theta.alpha.end(), log_alpha.begin(), clamped_log);
    const auto incoming = transposed_words(g);
    const double lambda = config.damping;

    auto& tau = result.tau;
    detail::WordAccumulator out_acc(W, Q);
    detail::WordAccumulator in_acc(W, Q);
    std::vector<double> logits(static_cast<std::size_t>(Q));
    std::vector<double> fresh(static_cast<std::size_t>(Q));

    for (int it = 0; it < config.fixed_point_max; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto out_row = g.row(i);
            const Word* in_row = incoming.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const auto tj = tau.row(j);
                out_acc.add(out_row[j], tj);
                in_acc.add(in_row[j], tj);
            }
            std::copy(log_alpha.begin(), log_alpha.end(), logits.begin());
            // X_ij given (q, l) for the outgoing pair, X_ji given (l, q) for the incoming one.
            for (auto w : out_acc.touched()) {
                const double* s = out_acc.sums(w);
                for (int q = 0; q < Q; ++q)
                    for (int l = 0; l < Q; ++l) logits[q] += s[l] * logs[(static_cast<std::size_t>(q) * Q + l) * W + w];
            }
            for (auto w : in_acc.touched()) {
                const double* s = in_acc.sums(w);
                for (int q = 0; q < Q; ++q)
                    for (int l = 0; l < Q; ++l) logits[q] += s[l] * logs[(static_cast<std::size_t>(l) * Q + q) * W + w];
            }
            out_acc.clear();
            in_acc.clear();

            softmax(logits, fresh);
            auto ti = tau.row(i);
            double sum = 0.0;
            for (int q = 0; q < Q; ++q) {
                fresh[q] = (1.0 - lambda) * fresh[q] + lambda * ti[q];
                sum += fresh[q];
            }
            for (int q = 0; q < Q; ++q) {
                const double v = fresh[q] / sum;
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

    // Node-wise coordinate ascent cannot lower the bound; guard against rounding.
    if (elbo(g, result.tau, theta) < elbo(g, tau_init, theta) - 1e-8) result.tau = tau_init;
    return result;
}

MStepResult m_step(const MultiplexGraph& g, const VariationalPosterior& tau)
{
    check_shapes(g, tau);
    const auto n = g.size();
    const int Q = tau.blocks();
    const auto W = g.num_words();

    MStepResult result{BlockParameters(Q, g.layers()), {}};
    auto& theta = result.theta;
    for (int q = 0; q < Q; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += tau(i, q);
        theta.alpha[q] = s / static_cast<double>(n);
    }

    const auto counts = pair_word_mass(g, tau);
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l) {
            const auto base = (static_cast<std::size_t>(q) * Q + l) * W;
            double denom = 0.0;
            for (std::size_t w = 0; w < W; ++w) denom += counts[base + w];
            auto cell = theta.cell(q, l);
            if (denom > 0.0) {
                for (std::size_t w = 0; w < W; ++w) cell[w] = counts[base + w] / denom;
            } else {
                std::fill(cell.begin(), cell.end(), 1.0 / static_cast<double>(W));
                result.empty_cells.emplace_back(q, l);
            }
        }
    return result;
}

// Outer loop -------------------------------------------------------------------

namespace {

void add_flag(std::vector<std::string>& flags, const std::string& flag)
{
    if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.push_back(flag);
}

} // namespace

FitResult fit_from(const MultiplexGraph& g, const VariationalPosterior& tau_init, const FitConfig& config)
{
    config.validate();
    check_shapes(g, tau_init);
    const auto start = std::chrono::steady_clock::now();
    const auto n = g.size();
    const int Q = tau_init.blocks();
    const double near_empty = 1.0 / (10.0 * static_cast<double>(n));

    FitResult result;
    result.Q = Q;
    result.seed = config.seed;
    result.tau = tau_init;

    auto ms = m_step(g, result.tau);
    result.theta = std::move(ms.theta);
    result.elbo_trace.push_back(elbo(g, result.tau, result.theta));

    auto note_degeneracy = [&](const MStepResult& step) {
        if (!step.empty_cells.empty()) add_flag(result.flags, "empty block pair");
        for (double a : result.theta.alpha)
            if (a < near_empty) add_flag(result.flags, "near-empty block");
    };
    note_degeneracy(ms);

    if (Q == 1) {
        result.converged = true;
    } else {
        for (int t = 0; t < config.max_outer; ++t) {
            auto es = e_step(g, result.theta, result.tau, config);
            if (!es.converged) add_flag(result.flags, "fixed point not converged");
            result.tau = std::move(es.tau);
            auto step = m_step(g, result.tau);
            result.theta = std::move(step.theta);
            note_degeneracy(step);

            const double previous = result.elbo_trace.back();
            const double current = elbo(g, result.tau, result.theta);
            result.elbo_trace.push_back(current);
            if (!std::isfinite(current)) break;
            if (current - previous <= config.elbo_rel_tol * std::abs(previous)) {
                result.converged = true;
                break;
            }
        }
    }
    if (!result.converged) add_flag(result.flags, "max outer iterations reached");
    result.map = result.tau.map_assignment();
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

FitResult fit(const MultiplexGraph& g, int Q, const FitConfig& config)
{
    config.validate();
    if (Q < 1) throw InputError("Q must be >= 1");
    if (static_cast<std::size_t>(Q) > g.size())
        throw InputError("Q=" + std::to_string(Q) + " exceeds the node count " + std::to_string(g.size()));
    const auto start = std::chrono::steady_clock::now();

    const int restarts = Q == 1 ? 1 : config.restarts;
    std::vector<FitResult> runs(static_cast<std::size_t>(restarts));
    std::vector<char> ok(static_cast<std::size_t>(restarts), 0);
    detail::parallel_for(static_cast<std::size_t>(restarts), config.threads, [&](std::size_t r) {
        const auto tau0 = initial_posterior(g, Q, config, static_cast<int>(r));
        runs[r] = fit_from(g, tau0, config);
        runs[r].restart = static_cast<int>(r);
        ok[r] = std::isfinite(runs[r].elbo()) ? 1 : 0;
    });

    int best = -1;
    std::vector<double> finals;
    for (int r = 0; r < restarts; ++r) {
        finals.push_back(runs[r].elbo());
        if (!ok[r]) continue;
        if (best < 0 || runs[r].elbo() > runs[best].elbo()) best = r;
    }
    if (best < 0) throw Error("all " + std::to_string(restarts) + " restarts diverged");

    FitResult result = std::move(runs[best]);
    result.restart_elbos = std::move(finals);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace msbm
