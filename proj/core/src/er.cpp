#include "msbm/er.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <cmath>

namespace msbm {

CovariateModel::CovariateModel(int layers, std::size_t dim)
    : K{layers}, d{dim}
{
    if (layers < 1 || layers > kMaxLayers) throw InputError("K must be in [1, 16]");
    mu.assign(num_free_words(), 0.0);
    beta.assign(num_free_words() * d, 0.0);
}

ErParameters fit_er(const MultiplexGraph& g)
{
    const auto counts = word_counts(g);
    const auto pairs = static_cast<double>(g.num_pairs());
    ErParameters er{g.layers(), std::vector<double>(counts.size())};
    for (std::size_t w = 0; w < counts.size(); ++w) er.pi[w] = static_cast<double>(counts[w]) / pairs;
    return er;
}

std::vector<double> er_word_log_prob(const CovariateModel& model, std::span<const double> y)
{
    if (y.size() != model.d) throw DimensionError("covariate vector has dimension " + std::to_string(y.size())
                                                  + ", model expects " + std::to_string(model.d));
    const auto V = model.num_free_words();
    std::vector<double> log_p(V + 1, 0.0);
    double shift = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
        double eta = model.mu[v];
        for (std::size_t k = 0; k < model.d; ++k) eta += model.coef(v, k) * y[k];
        log_p[v + 1] = eta;
        shift = std::max(shift, eta);
    }
    double denom = 0.0;
    for (double eta : log_p) denom += std::exp(eta - shift);
    const double log_norm = shift + std::log(denom);
    for (auto& lp : log_p) lp -= log_norm;
    return log_p;
}

std::vector<double> er_word_prob(const CovariateModel& model, std::span<const double> y)
{
    auto p = er_word_log_prob(model, y);
    for (auto& x : p) x = std::exp(x);
    return p;
}

PairTable make_pair_table(const MultiplexGraph& g, const EdgeCovariates* cov)
{
    const auto n = g.size();
    if (cov && cov->size() != n) throw DimensionError("covariates and graph disagree on n");
    const auto d = cov ? cov->dim() : 0;
    PairTable t;
    t.words.reserve(g.num_pairs());
    t.covariates.reserve(g.num_pairs() * d);
    t.src.reserve(g.num_pairs());
    t.dst.reserve(g.num_pairs());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            t.words.push_back(g.word(i, j));
            t.src.push_back(i);
            t.dst.push_back(j);
            if (cov) {
                auto y = cov->at(i, j);
                t.covariates.insert(t.covariates.end(), y.begin(), y.end());
            }
        }
    return t;
}

GlmFit fit_er_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const GlmConfig& config)
{
    const auto table = make_pair_table(g, &cov);
    LogitData data{g.layers(), cov.dim(), table.words, table.covariates, {}};
    return fit_multinomial_logit(data, config);
}

CovariateBlockParameters::CovariateBlockParameters(int blocks, int layers, std::size_t dim)
    : Q{blocks}, K{layers}, d{dim}, alpha(static_cast<std::size_t>(blocks), 1.0 / blocks),
      cells(static_cast<std::size_t>(blocks) * blocks, CovariateModel(layers, dim))
{
}

} // namespace msbm
