#include "msbm/lab.hpp"

#include "detail.hpp"
#include "msbm/error.hpp"
#include "msbm/metrics.hpp"
#include "msbm/rng.hpp"
#include "msbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msbm {

LabPreconditions check_lab_preconditions(const BlockParameters& truth, double zeta, double gamma, double tol)
{
    truth.validate();
    LabPreconditions pre;
    pre.identifiability = check_identifiability(truth, tol);
    if (!pre.identifiability.pass) pre.violations.push_back("identifiability: " + pre.identifiability.summary());

    const int Q = truth.Q;
    for (int q = 0; q < Q; ++q)
        for (int q2 = q + 1; q2 < Q; ++q2) {
            bool distinct = false;
            for (int l = 0; l < Q && !distinct; ++l)
                for (std::size_t w = 0; w < truth.num_words() && !distinct; ++w)
                    distinct = std::abs(truth.prob(q, l, w) - truth.prob(q2, l, w)) > tol
                               || std::abs(truth.prob(l, q, w) - truth.prob(l, q2, w)) > tol;
            if (!distinct)
                pre.violations.push_back("A1: blocks " + std::to_string(q + 1) + " and " + std::to_string(q2 + 1)
                                         + " have identical connection profiles");
        }

    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l)
            for (std::size_t w = 0; w < truth.num_words(); ++w) {
                const double p = truth.prob(q, l, w);
                if (p > 0.0 && p < 1.0 && (p < zeta || p > 1.0 - zeta)) {
                    std::ostringstream msg;
                    msg << "A2: pi(" << q + 1 << "," << l + 1 << ")[" << w << "] = " << p << " outside [" << zeta
                        << ", " << 1.0 - zeta << "]";
                    pre.violations.push_back(msg.str());
                }
            }

    if (!(gamma > 0.0 && gamma < 1.0 / Q)) pre.violations.push_back("A3: gamma must lie in (0, 1/Q)");
    for (int q = 0; q < Q; ++q)
        if (truth.alpha[q] < gamma || truth.alpha[q] > 1.0 - gamma) {
            std::ostringstream msg;
            msg << "A3: alpha_" << q + 1 << " = " << truth.alpha[q] << " outside [" << gamma << ", " << 1.0 - gamma << "]";
            pre.violations.push_back(msg.str());
        }

    pre.ok = pre.violations.empty();
    return pre;
}

double median(std::vector<double> values)
{
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const auto m = values.size() / 2;
    return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

LabTable error_vs_n(const LabConfig& config)
{
    if (config.replications < 1) throw InputError("replications must be >= 1");
    if (config.n_grid.empty()) throw InputError("n_grid must not be empty");
    config.fit.validate();

    LabTable table;
    table.preconditions = check_lab_preconditions(config.truth, config.zeta, config.gamma, config.identifiability_tol);
    if (!table.preconditions.ok) return table;

    const auto reps = static_cast<std::size_t>(config.replications);
    table.rows.resize(config.n_grid.size() * reps);
    FitConfig inner = config.fit;
    inner.threads = 1;

    detail::parallel_for(table.rows.size(), config.fit.threads, [&](std::size_t k) {
        const auto g_idx = k / reps;
        auto& row = table.rows[k];
        row.n = config.n_grid[g_idx];
        row.replication = static_cast<int>(k % reps);
        const auto sim_seed = mix_seed(config.seed, (static_cast<std::uint64_t>(g_idx) << 20) + row.replication);
        try {
            const auto sample = sample_sbm(config.truth, row.n, sim_seed);
            FitConfig fc = inner;
            fc.seed = mix_seed(sim_seed, 1);
            const auto result = fit(sample.graph, config.truth.Q, fc);
            const auto aligned = align_blocks(result.theta, config.truth);
            row.err_pi = aligned.err_pi;
            row.err_alpha = aligned.err_alpha;
            row.ari = adjusted_rand_index(result.map, sample.truth);
            row.elbo_monotone = true;
            for (std::size_t t = 1; t < result.elbo_trace.size(); ++t)
                if (result.elbo_trace[t] < result.elbo_trace[t - 1] - 1e-8) row.elbo_monotone = false;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });

    for (std::size_t g_idx = 0; g_idx < config.n_grid.size(); ++g_idx) {
        LabSummary s;
        s.n = config.n_grid[g_idx];
        std::vector<double> pi_errs, alpha_errs;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& row = table.rows[g_idx * reps + r];
            if (!row.ok) {
                ++s.failures;
                continue;
            }
            pi_errs.push_back(row.err_pi);
            alpha_errs.push_back(row.err_alpha);
        }
        s.median_err_pi = median(pi_errs);
        s.median_err_alpha = median(alpha_errs);
        table.summary.push_back(s);
    }
    return table;
}

} // namespace msbm
