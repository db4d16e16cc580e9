#include "msbm/selection.hpp"

#include "detail.hpp"
#include "msbm/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace msbm {

double icl_penalty(int Q, int K, std::size_t n, std::size_t d)
{
    if (Q < 1 || K < 1 || n < 2) throw InputError("icl_penalty needs Q >= 1, K >= 1, n >= 2");
    const double q = Q;
    const double dim = q * q * static_cast<double>((1ULL << K) - 1) * static_cast<double>(1 + d);
    const double edges = static_cast<double>(K) * static_cast<double>(n) * static_cast<double>(n - 1);
    return 0.5 * (dim * std::log(edges) + (q - 1.0) * std::log(static_cast<double>(n)));
}

double icl(const MultiplexGraph& g, const FitResult& fit)
{
    return complete_log_likelihood(g, fit.map, fit.theta) - icl_penalty(fit.Q, g.layers(), g.size());
}

double icl_covariates(const MultiplexGraph& g, const EdgeCovariates& cov, const CovariateFitResult& fit)
{
    return complete_log_likelihood_covariates(g, cov, fit.map, fit.theta)
           - icl_penalty(fit.Q, g.layers(), g.size(), cov.dim());
}

IclReport select_q(const MultiplexGraph& g, std::span<const int> candidates, const FitConfig& config)
{
    if (candidates.empty()) throw InputError("select_q needs at least one candidate Q");
    const std::set<int> unique(candidates.begin(), candidates.end());
    const std::vector<int> qs(unique.begin(), unique.end());
    if (qs.front() < 1) throw InputError("candidate Q must be >= 1");
    if (static_cast<std::size_t>(qs.back()) > g.size()) throw InputError("candidate Q exceeds the node count");

    IclReport report;
    for (int q : qs)
        if (g.size() < 2 * static_cast<std::size_t>(q))
            report.warnings.push_back("n=" + std::to_string(g.size()) + " < 2Q for Q=" + std::to_string(q)
                                      + "; identifiability is not guaranteed");

    report.records.resize(qs.size());
    std::vector<std::optional<FitResult>> fits(qs.size());
    FitConfig inner = config;
    inner.threads = qs.size() > 1 ? 1 : config.threads;
    detail::parallel_for(qs.size(), config.threads, [&](std::size_t k) {
        auto& rec = report.records[k];
        rec.Q = qs[k];
        try {
            auto f = fit(g, qs[k], inner);
            rec.best_elbo = f.elbo();
            rec.completed_loglik = complete_log_likelihood(g, f.map, f.theta);
            rec.penalty = icl_penalty(qs[k], g.layers(), g.size());
            rec.icl = rec.completed_loglik - rec.penalty;
            rec.converged = f.converged;
            rec.flags = f.flags;
            rec.ok = std::isfinite(rec.icl);
            fits[k] = std::move(f);
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    });

    const IclRecord* best = nullptr;
    for (const auto& rec : report.records) {
        if (!rec.ok) continue;
        if (!best || rec.icl > best->icl + kIclTieTolerance) best = &rec;
    }
    report.selected_q = best ? best->Q : 0;
    for (auto& f : fits)
        if (f) report.fits.push_back(std::move(*f));
    return report;
}

} // namespace msbm
