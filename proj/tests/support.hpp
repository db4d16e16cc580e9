#pragma once

// Reference implementations used as oracles. They follow the textbook
// formulas literally (nested loops, no aggregation) and share no code with the
// library beyond the data containers.

#include <msbm/graph.hpp>
#include <msbm/model.hpp>
#include <msbm/vem.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace testing {

using namespace msbm;

inline double ref_log(double p)
{
    return std::log(std::clamp(p, 1e-12, 1.0 - 1e-12));
}

inline MultiplexGraph make_graph(std::size_t n, int K, std::initializer_list<std::tuple<std::size_t, std::size_t, int>> entries)
{
    std::vector<Word> words(n * n, 0);
    for (auto [i, j, w] : entries) words[i * n + j] = static_cast<Word>(w);
    return MultiplexGraph(n, K, std::move(words));
}

inline MultiplexGraph random_graph(std::size_t n, int K, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> word(0, (1 << K) - 1);
    std::vector<Word> words(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) words[i * n + j] = static_cast<Word>(word(rng));
    return MultiplexGraph(n, K, std::move(words));
}

inline std::vector<double> dirichlet(std::size_t size, std::mt19937_64& rng, double shape = 1.0)
{
    std::gamma_distribution<double> gamma(shape, 1.0);
    std::vector<double> p(size);
    double sum = 0.0;
    for (double& x : p) sum += (x = gamma(rng));
    for (double& x : p) x /= sum;
    return p;
}

inline BlockParameters random_theta(int Q, int K, std::mt19937_64& rng)
{
    BlockParameters theta(Q, K);
    theta.alpha = dirichlet(static_cast<std::size_t>(Q), rng);
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l) {
            auto p = dirichlet(theta.num_words(), rng);
            std::copy(p.begin(), p.end(), theta.cell(q, l).begin());
        }
    return theta;
}

inline VariationalPosterior random_tau(std::size_t n, int Q, std::mt19937_64& rng)
{
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = dirichlet(static_cast<std::size_t>(Q), rng);
        values.insert(values.end(), row.begin(), row.end());
    }
    return VariationalPosterior(n, Q, std::move(values));
}

inline double ref_complete_loglik(const MultiplexGraph& g, const std::vector<int>& z, const BlockParameters& theta)
{
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        total += ref_log(theta.alpha[z[i]]);
        for (std::size_t j = 0; j < g.size(); ++j)
            if (i != j) total += ref_log(theta.prob(z[i], z[j], g.word(i, j)));
    }
    return total;
}

/// Sum over every assignment, visiting them in plain counting order.
inline double ref_exact_loglik(const MultiplexGraph& g, const BlockParameters& theta)
{
    const std::size_t n = g.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(theta.Q);
    std::vector<double> terms(total);
    std::vector<int> z(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
        auto rest = idx;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = static_cast<int>(rest % theta.Q);
            rest /= theta.Q;
        }
        terms[idx] = ref_complete_loglik(g, z, theta);
    }
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

inline double ref_elbo(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta)
{
    double total = 0.0;
    const int Q = theta.Q;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (i == j) continue;
            for (int q = 0; q < Q; ++q)
                for (int l = 0; l < Q; ++l) total += tau(i, q) * tau(j, l) * ref_log(theta.prob(q, l, g.word(i, j)));
        }
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int q = 0; q < Q; ++q)
            if (tau(i, q) > 0.0) total += tau(i, q) * (ref_log(theta.alpha[q]) - std::log(tau(i, q)));
    return total;
}

inline BlockParameters ref_m_step(const MultiplexGraph& g, const VariationalPosterior& tau)
{
    const int Q = tau.blocks();
    BlockParameters theta(Q, g.layers());
    for (int q = 0; q < Q; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += tau(i, q);
        theta.alpha[q] = s / static_cast<double>(g.size());
    }
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l) {
            std::vector<double> num(theta.num_words(), 0.0);
            double den = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = 0; j < g.size(); ++j) {
                    if (i == j) continue;
                    num[g.word(i, j)] += tau(i, q) * tau(j, l);
                    den += tau(i, q) * tau(j, l);
                }
            for (std::size_t w = 0; w < num.size(); ++w) theta.prob(q, l, w) = den > 0 ? num[w] / den : 1.0 / num.size();
        }
    return theta;
}

inline bool monotone(const std::vector<double>& trace, double slack = 1e-8)
{
    for (std::size_t t = 1; t < trace.size(); ++t)
        if (trace[t] < trace[t - 1] - slack) return false;
    return true;
}

/// Two-block, two-layer instance with asymmetric, well separated cells.
inline BlockParameters planted_theta()
{
    BlockParameters theta(2, 2);
    theta.alpha = {0.5, 0.5};
    const double cells[4][4] = {
        {0.10, 0.15, 0.15, 0.60}, // (1,1)
        {0.70, 0.10, 0.15, 0.05}, // (1,2)
        {0.75, 0.10, 0.05, 0.10}, // (2,1)
        {0.15, 0.20, 0.15, 0.50}, // (2,2)
    };
    for (int c = 0; c < 4; ++c) std::copy(cells[c], cells[c] + 4, theta.cell(c / 2, c % 2).begin());
    return theta;
}

// Finite-difference gradient of the bound with respect to softmax logits of alpha and of every pi cell.
inline double theta_gradient_norm(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta)
{
    const double h = 1e-6;
    double worst = 0.0;
    auto perturbed = [&](std::span<const double> simplex, std::size_t k, double delta, auto&& write) {
        std::vector<double> logits(simplex.size());
        for (std::size_t c = 0; c < simplex.size(); ++c) logits[c] = std::log(simplex[c]);
        logits[k] += delta;
        const double m = *std::max_element(logits.begin(), logits.end());
        double s = 0.0;
        for (double& x : logits) s += (x = std::exp(x - m));
        for (double& x : logits) x /= s;
        BlockParameters t = theta;
        write(t, logits);
        return elbo(g, tau, t);
    };
    for (std::size_t k = 0; k < theta.alpha.size(); ++k) {
        auto write = [](BlockParameters& t, const std::vector<double>& v) { t.alpha = v; };
        const double d = (perturbed(theta.alpha, k, h, write) - perturbed(theta.alpha, k, -h, write)) / (2 * h);
        worst = std::max(worst, std::abs(d));
    }
    for (int q = 0; q < theta.Q; ++q)
        for (int l = 0; l < theta.Q; ++l)
            for (std::size_t w = 0; w < theta.num_words(); ++w) {
                auto write = [q, l](BlockParameters& t, const std::vector<double>& v) {
                    std::copy(v.begin(), v.end(), t.cell(q, l).begin());
                };
                const double d = (perturbed(theta.cell(q, l), w, h, write) - perturbed(theta.cell(q, l), w, -h, write)) / (2 * h);
                worst = std::max(worst, std::abs(d));
            }
    return worst;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("msbm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
