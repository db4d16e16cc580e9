#include "msbm/rng.hpp"
#include "msbm/vem.hpp"

#include "msbm/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace msbm {

namespace {

// Confidence placed on the spectral label when softening it into tau.
constexpr double kSpectralConfidence = 0.9;

Assignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed)
{
    const auto n = static_cast<std::size_t>(points.rows());
    PhiloxEngine rng(seed, Stream::kmeans, 0);

    // k-means++ seeding
    std::vector<Eigen::Index> centers_idx;
    centers_idx.push_back(static_cast<Eigen::Index>(std::min<std::size_t>(n - 1, static_cast<std::size_t>(rng.uniform() * n))));
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers_idx.size()) < k) {
        const auto& last = points.row(centers_idx.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], (points.row(static_cast<Eigen::Index>(i)) - last).squaredNorm());
            total += dist[i];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            pick = static_cast<Eigen::Index>(sample_categorical(dist, rng.uniform()));
        } else {
            pick = static_cast<Eigen::Index>(centers_idx.size());
        }
        centers_idx.push_back(pick);
    }

    Eigen::MatrixXd centers(k, points.cols());
    for (int c = 0; c < k; ++c) centers.row(c) = points.row(centers_idx[c]);

    Assignment labels(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (points.row(static_cast<Eigen::Index>(i)) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            moved = moved || labels[i] != best;
            labels[i] = best;
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
            ++sizes[labels[i]];
        }
        for (int c = 0; c < k; ++c)
            if (sizes[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(sizes[c]);
        if (!moved && iter > 0) break;
    }
    return labels;
}

} // namespace

Assignment spectral_labels(const MultiplexGraph& g, int Q, std::uint64_t seed)
{
    const auto n = g.size();
    if (Q <= 1) return Assignment(n, 0);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double edges = std::popcount(static_cast<unsigned>(g.word(i, j)));
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += edges;
            A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += edges;
        }
    // Dense layers carry their signal in the complement; centring keeps both cases visible.
    const double mean = A.sum() / static_cast<double>(N * (N - 1));
    A.array() -= mean;
    A.diagonal().setZero();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success) return Assignment(n, 0);
    const auto& values = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(values[a]) > std::abs(values[b]); });

    const int dims = std::min<int>(Q, static_cast<int>(N));
    Eigen::MatrixXd embedding(N, dims);
    for (int c = 0; c < dims; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
        // Fix the sign so the embedding does not depend on the eigensolver's convention.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0) v = -v;
        // Weight by |eigenvalue| so weak, noise-level directions do not dominate the clustering.
        embedding.col(c) = std::abs(values[order[c]]) * v;
    }
    return kmeans(embedding, Q, seed);
}

VariationalPosterior initial_posterior(const MultiplexGraph& g, int Q, const FitConfig& config, int restart)
{
    const auto n = g.size();
    if (Q == 1) return VariationalPosterior(n, 1);

    const bool spectral = config.init == InitStrategy::spectral
                          || (config.init == InitStrategy::spectral_then_random && restart == 0);
    if (spectral) {
        const auto labels = spectral_labels(g, Q, mix_seed(config.seed, static_cast<std::uint64_t>(restart)));
        return VariationalPosterior::from_assignment(labels, Q, kSpectralConfidence);
    }

    // Dirichlet(1, ..., 1) rows: normalised unit exponentials.
    PhiloxEngine rng(config.seed, Stream::restart_init, static_cast<std::uint64_t>(restart));
    VariationalPosterior tau(n, Q);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = tau.row(i);
        double sum = 0.0;
        for (auto& t : row) {
            t = rng.exponential();
            sum += t;
        }
        for (auto& t : row) t /= sum;
    }
    return tau;
}

} // namespace msbm
