#include "msbm/model.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace msbm {

double clamped_log(double p) noexcept
{
    return std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor));
}

double x_log_x(double x) noexcept
{
    return x > 0.0 ? x * std::log(x) : 0.0;
}

BlockParameters::BlockParameters(int blocks, int layers)
    : Q{blocks}, K{layers}
{
    if (blocks < 1) throw InputError("Q must be >= 1");
    if (layers < 1 || layers > kMaxLayers) throw InputError("K must be in [1, 16]");
    alpha.assign(static_cast<std::size_t>(Q), 1.0 / Q);
    pi.assign(static_cast<std::size_t>(Q) * Q * num_words(), 1.0 / static_cast<double>(num_words()));
}

void BlockParameters::validate(double tol) const
{
    if (Q < 1 || K < 1 || K > kMaxLayers) throw InputError("invalid (Q, K)");
    if (alpha.size() != static_cast<std::size_t>(Q)) throw DimensionError("alpha must have length Q");
    if (pi.size() != static_cast<std::size_t>(Q) * Q * num_words())
        throw DimensionError("pi must have Q*Q*2^K entries");
    auto check_simplex = [tol](std::span<const double> v, const std::string& what) {
        double sum = 0.0;
        for (double x : v) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw InputError(what + " has a negative or non-finite entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > tol) throw InputError(what + " does not sum to 1");
    };
    check_simplex(alpha, "alpha");
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < Q; ++l)
            check_simplex(cell(q, l), "pi cell (" + std::to_string(q + 1) + "," + std::to_string(l + 1) + ")");
}

BlockParameters BlockParameters::permuted(std::span<const int> perm) const
{
    if (perm.size() != static_cast<std::size_t>(Q)) throw DimensionError("block permutation has wrong length");
    BlockParameters out(Q, K);
    for (int q = 0; q < Q; ++q) {
        out.alpha[perm[q]] = alpha[q];
        for (int l = 0; l < Q; ++l) {
            auto src = cell(q, l);
            std::copy(src.begin(), src.end(), out.cell(perm[q], perm[l]).begin());
        }
    }
    return out;
}

double complete_log_likelihood(const MultiplexGraph& g, std::span<const int> z, const BlockParameters& theta)
{
    const auto n = g.size();
    if (z.size() != n) throw DimensionError("assignment length differs from node count");
    if (theta.K != g.layers()) throw DimensionError("parameter K differs from graph layer count");
    for (int label : z)
        if (label < 0 || label >= theta.Q) throw DimensionError("assignment label outside [0, Q)");

    const auto W = theta.num_words();
    std::vector<double> log_pi(theta.pi.size());
    std::transform(theta.pi.begin(), theta.pi.end(), log_pi.begin(), clamped_log);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.row(i);
        const auto base = static_cast<std::size_t>(z[i]) * theta.Q;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) total += log_pi[(base + z[j]) * W + row[j]];
        total += clamped_log(theta.alpha[z[i]]);
    }
    return total;
}

double marginal_layer_prob(std::span<const double> cell, int layer)
{
    const auto W = cell.size();
    if (W < 2 || (W & (W - 1)) != 0) throw DimensionError("cell length must be a power of two >= 2");
    const int K = std::countr_zero(W);
    if (layer < 1 || layer > K) throw InputError("invalid layer " + std::to_string(layer));
    double p = 0.0;
    for (std::size_t w = 0; w < W; ++w)
        if (word_bit(static_cast<Word>(w), layer)) p += cell[w];
    return p;
}

double conditional_layer_prob(std::span<const double> cell, int layer, int value, std::span<const LayerValue> given)
{
    const auto W = cell.size();
    if (W < 2 || (W & (W - 1)) != 0) throw DimensionError("cell length must be a power of two >= 2");
    const int K = std::countr_zero(W);
    if (layer < 1 || layer > K) throw InputError("invalid target layer " + std::to_string(layer));
    if (value != 0 && value != 1) throw InputError("layer value must be 0 or 1");
    for (const auto& c : given) {
        if (c.layer < 1 || c.layer > K || c.layer == layer) throw InputError("invalid conditioning layer");
        if (c.value != 0 && c.value != 1) throw InputError("conditioning value must be 0 or 1");
    }

    double joint = 0.0;
    double mass = 0.0;
    for (std::size_t w = 0; w < W; ++w) {
        const auto word = static_cast<Word>(w);
        const bool matches = std::all_of(given.begin(), given.end(),
                                         [&](const LayerValue& c) { return word_bit(word, c.layer) == (c.value == 1); });
        if (!matches) continue;
        mass += cell[w];
        if (word_bit(word, layer) == (value == 1)) joint += cell[w];
    }
    if (mass <= 0.0) throw ZeroProbabilityError("conditioning event has probability zero");
    return joint / mass;
}

bool is_independent(std::span<const double> cell, double tol)
{
    if (cell.size() != 4) throw UnsupportedError("independence test is defined for K = 2 only");
    // word index: bit 0 = layer 1, bit 1 = layer 2
    return std::abs(cell[0] * cell[3] - cell[1] * cell[2]) <= tol;
}

long long count_parameters(int Q, int K)
{
    if (Q < 1 || K < 1 || K > kMaxLayers) throw InputError("count_parameters needs Q >= 1 and K in [1, 16]");
    const long long q = Q;
    return ((1LL << K) - 1) * q * q + (q - 1);
}

IdentifiabilityReport check_identifiability(const BlockParameters& theta, double tol)
{
    IdentifiabilityReport report;
    const auto W = theta.num_words();
    for (int q = 0; q < theta.Q; ++q)
        if (!(theta.alpha[q] > tol)) report.small_alpha.push_back(q);

    report.r.assign(W, std::vector<double>(static_cast<std::size_t>(theta.Q), 0.0));
    for (std::size_t w = 0; w < W; ++w) {
        auto& r = report.r[w];
        for (int q = 0; q < theta.Q; ++q)
            for (int l = 0; l < theta.Q; ++l) r[q] += theta.prob(q, l, w) * theta.alpha[l];
        for (int q = 0; q < theta.Q; ++q)
            for (int q2 = q + 1; q2 < theta.Q; ++q2) {
                const double gap = std::abs(r[q] - r[q2]);
                if (!(gap > tol)) report.collisions.push_back({w, q, q2, gap});
            }
    }
    report.pass = report.small_alpha.empty() && report.collisions.empty();
    return report;
}

std::string IdentifiabilityReport::summary() const
{
    if (pass) return "PASS";
    std::ostringstream out;
    out << "FAIL";
    for (int q : small_alpha) out << "; alpha_" << q + 1 << " not positive";
    for (const auto& c : collisions)
        out << "; word " << c.word << ": r_" << c.q1 + 1 << " and r_" << c.q2 + 1 << " differ by " << c.gap;
    return out.str();
}

} // namespace msbm
