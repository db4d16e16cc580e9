#include "msbm/oracle.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace msbm {

std::uint64_t assignment_count(int Q, std::size_t n) noexcept
{
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (count > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(Q))
            return std::numeric_limits<std::uint64_t>::max();
        count *= static_cast<std::uint64_t>(Q);
    }
    return count;
}

namespace {

constexpr int kResyncInterval = 64;

void guard(const MultiplexGraph& g, const BlockParameters& theta, std::uint64_t limit)
{
    if (theta.K != g.layers()) throw DimensionError("theta and graph disagree on K");
    const auto count = assignment_count(theta.Q, g.size());
    if (count > limit)
        throw TooLargeError("Q^n = " + (count == std::numeric_limits<std::uint64_t>::max() ? std::string("overflow") : std::to_string(count))
                            + " assignments exceeds the enumeration limit " + std::to_string(limit));
}

/**
 * Visits every assignment in reflected mixed-radix Gray order (one label
 * changes per step) and calls visit(z, index, log_joint).
 */
template <typename Visit>
void enumerate(const MultiplexGraph& g, const BlockParameters& theta, Visit&& visit)
{
    const auto n = g.size();
    const int Q = theta.Q;
    const auto W = theta.num_words();
    std::vector<double> log_pi(theta.pi.size());
    std::transform(theta.pi.begin(), theta.pi.end(), log_pi.begin(), clamped_log);
    std::vector<double> log_alpha(theta.alpha.size());
    std::transform(theta.alpha.begin(), theta.alpha.end(), log_alpha.begin(), clamped_log);
    auto L = [&](int q, int l, Word w) { return log_pi[(static_cast<std::size_t>(q) * Q + l) * W + w]; };

    Assignment z(n, 0);
    std::uint64_t index = 0;
    double log_joint = complete_log_likelihood(g, z, theta);
    visit(std::as_const(z), index, log_joint);
    if (Q == 1) return;

    std::vector<std::uint64_t> place(n, 1);
    for (std::size_t i = 1; i < n; ++i) place[i] = place[i - 1] * static_cast<std::uint64_t>(Q);

    // Knuth, TAOCP 7.2.1.1 Algorithm H (loopless reflected mixed-radix Gray).
    std::vector<std::size_t> focus(n + 1);
    for (std::size_t j = 0; j <= n; ++j) focus[j] = j;
    std::vector<int> dir(n, 1);
    int steps = 0;
    for (;;) {
        const std::size_t j = focus[0];
        focus[0] = 0;
        if (j == n) break;
        const int from = z[j];
        const int to = from + dir[j];
        z[j] = to;
        if (to == 0 || to == Q - 1) {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        index = to > from ? index + place[j] : index - place[j];

        if (++steps % kResyncInterval == 0) {
            log_joint = complete_log_likelihood(g, z, theta);
        } else {
            double delta = log_alpha[to] - log_alpha[from];
            const auto out = g.row(j);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                const auto back = g.word(k, j);
                delta += L(to, z[k], out[k]) - L(from, z[k], out[k]) + L(z[k], to, back) - L(z[k], from, back);
            }
            log_joint += delta;
        }
        visit(std::as_const(z), index, log_joint);
    }
}

} // namespace

double exact_log_likelihood(const MultiplexGraph& g, const BlockParameters& theta)
{
    guard(g, theta, kMaxLikelihoodAssignments);
    double top = -std::numeric_limits<double>::infinity();
    double scaled = 0.0;
    enumerate(g, theta, [&](const Assignment&, std::uint64_t, double v) {
        if (v <= top) {
            scaled += std::exp(v - top);
        } else {
            scaled = scaled * std::exp(top - v) + 1.0;
            top = v;
        }
    });
    return top + std::log(scaled);
}

namespace {

struct Enumerated
{
    std::vector<double> log_joint; // by assignment index
    double log_likelihood = 0.0;
};

Enumerated enumerate_all(const MultiplexGraph& g, const BlockParameters& theta)
{
    guard(g, theta, kMaxPosteriorAssignments);
    Enumerated e;
    e.log_joint.assign(assignment_count(theta.Q, g.size()), 0.0);
    enumerate(g, theta, [&](const Assignment&, std::uint64_t idx, double v) { e.log_joint[idx] = v; });
    // Deterministic reduction in index order.
    const double top = *std::max_element(e.log_joint.begin(), e.log_joint.end());
    double sum = 0.0;
    for (double v : e.log_joint) sum += std::exp(v - top);
    e.log_likelihood = top + std::log(sum);
    return e;
}

} // namespace

Assignment ExactPosterior::decode(std::uint64_t index) const
{
    Assignment z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = static_cast<int>(index % static_cast<std::uint64_t>(Q));
        index /= static_cast<std::uint64_t>(Q);
    }
    return z;
}

std::uint64_t ExactPosterior::mode() const
{
    return static_cast<std::uint64_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

ExactPosterior exact_posterior(const MultiplexGraph& g, const BlockParameters& theta)
{
    auto e = enumerate_all(g, theta);
    ExactPosterior post;
    post.Q = theta.Q;
    post.n = g.size();
    post.log_likelihood = e.log_likelihood;
    post.probs.resize(e.log_joint.size());
    post.marginals.assign(post.n * static_cast<std::size_t>(post.Q), 0.0);
    for (std::uint64_t idx = 0; idx < e.log_joint.size(); ++idx) {
        const double p = std::exp(e.log_joint[idx] - e.log_likelihood);
        post.probs[idx] = p;
        auto rest = idx;
        for (std::size_t i = 0; i < post.n; ++i) {
            post.marginals[i * post.Q + rest % post.Q] += p;
            rest /= static_cast<std::uint64_t>(post.Q);
        }
    }
    return post;
}

KlCheck kl_decomposition_check(const MultiplexGraph& g, const VariationalPosterior& tau, const BlockParameters& theta)
{
    if (tau.size() != g.size() || tau.blocks() != theta.Q) throw DimensionError("tau shape does not match");
    auto e = enumerate_all(g, theta);
    KlCheck check;
    check.log_likelihood = e.log_likelihood;
    check.elbo = elbo(g, tau, theta);

    const auto n = g.size();
    const auto Q = static_cast<std::uint64_t>(theta.Q);
    double kl = 0.0;
    for (std::uint64_t idx = 0; idx < e.log_joint.size(); ++idx) {
        double r = 1.0;
        auto rest = idx;
        for (std::size_t i = 0; i < n && r > 0.0; ++i) {
            r *= tau(i, static_cast<int>(rest % Q));
            rest /= Q;
        }
        if (r <= 0.0) continue;
        kl += r * (std::log(r) - (e.log_joint[idx] - e.log_likelihood));
    }
    check.kl = kl;
    check.residual = std::abs(check.log_likelihood - check.elbo - check.kl);
    return check;
}

} // namespace msbm
