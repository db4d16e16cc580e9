#include "msbm/metrics.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace msbm {

double adjusted_rand_index(std::span<const int> a, std::span<const int> b)
{
    if (a.size() != b.size()) throw DimensionError("labelings have different lengths");
    const auto n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0;
    for (const auto& [_, c] : table) index += choose2(c);
    double sum_rows = 0.0;
    for (const auto& [_, c] : rows) sum_rows += choose2(c);
    double sum_cols = 0.0;
    for (const auto& [_, c] : cols) sum_cols += choose2(c);
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0; // both trivial partitions
    return (index - expected) / (max_index - expected);
}

std::vector<int> hungarian(std::span<const double> cost, int size)
{
    if (cost.size() != static_cast<std::size_t>(size) * size) throw DimensionError("cost matrix must be square");
    // Jonker-Volgenant style potentials, 1-based internal indexing.
    const int n = size;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assignment[p[j] - 1] = j - 1;
    return assignment;
}

double pi_distance(const BlockParameters& estimate, const BlockParameters& truth, std::span<const int> perm)
{
    const auto W = truth.num_words();
    double err = 0.0;
    for (int q = 0; q < estimate.Q; ++q)
        for (int l = 0; l < estimate.Q; ++l)
            for (std::size_t w = 0; w < W; ++w)
                err = std::max(err, std::abs(estimate.prob(q, l, w) - truth.prob(perm[q], perm[l], w)));
    return err;
}

namespace {

double alpha_distance(const BlockParameters& estimate, const BlockParameters& truth, std::span<const int> perm)
{
    double err = 0.0;
    for (int q = 0; q < estimate.Q; ++q) err = std::max(err, std::abs(estimate.alpha[q] - truth.alpha[perm[q]]));
    return err;
}

} // namespace

Alignment align_blocks(const BlockParameters& estimate, const BlockParameters& truth)
{
    if (estimate.Q != truth.Q || estimate.K != truth.K) throw DimensionError("cannot align parameters of different shape");
    const int Q = truth.Q;
    Alignment best;
    best.err_pi = std::numeric_limits<double>::infinity();

    std::vector<int> perm(static_cast<std::size_t>(Q));
    std::iota(perm.begin(), perm.end(), 0);
    if (Q <= 8) {
        do {
            const double e = pi_distance(estimate, truth, perm);
            if (e < best.err_pi) {
                best.err_pi = e;
                best.perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        // Block profile: alpha and the per-word connection rates r_q(w) = sum_l pi_ql(w) alpha_l.
        const auto W = truth.num_words();
        std::vector<double> cost(static_cast<std::size_t>(Q) * Q, 0.0);
        for (int q = 0; q < Q; ++q)
            for (int t = 0; t < Q; ++t) {
                double c = std::abs(estimate.alpha[q] - truth.alpha[t]);
                for (std::size_t w = 0; w < W; ++w) {
                    double re = 0.0, rt = 0.0, ce = 0.0, ct = 0.0;
                    for (int l = 0; l < Q; ++l) {
                        re += estimate.prob(q, l, w) * estimate.alpha[l];
                        rt += truth.prob(t, l, w) * truth.alpha[l];
                        ce += estimate.prob(l, q, w) * estimate.alpha[l];
                        ct += truth.prob(l, t, w) * truth.alpha[l];
                    }
                    c = std::max(c, std::max(std::abs(re - rt), std::abs(ce - ct)));
                }
                cost[static_cast<std::size_t>(q) * Q + t] = c;
            }
        best.perm = hungarian(cost, Q);
        best.err_pi = pi_distance(estimate, truth, best.perm);
    }
    best.err_alpha = alpha_distance(estimate, truth, best.perm);
    return best;
}

} // namespace msbm
