#include "support.hpp"

#include <msbm/error.hpp>
#include <msbm/oracle.hpp>
#include <msbm/rng.hpp>
#include <msbm/simulate.hpp>

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace msbm;
using doctest::Approx;

TEST_SUITE("oracle")
{
    TEST_CASE("one block has a single assignment")
    {
        std::mt19937_64 rng(1);
        const auto g = testing::random_graph(6, 2, rng);
        const auto theta = testing::random_theta(1, 2, rng);
        CHECK(exact_log_likelihood(g, theta) == Approx(complete_log_likelihood(g, std::vector<int>(6, 0), theta)).epsilon(1e-14));
        const auto check = kl_decomposition_check(g, VariationalPosterior(6, 1), theta);
        CHECK(std::abs(check.kl) < 1e-12);
        CHECK(check.residual < 1e-10);
    }

    TEST_CASE("two nodes by hand")
    {
        const auto g = testing::make_graph(2, 1, {{0, 1, 1}});
        BlockParameters theta(2, 1);
        theta.alpha = {0.4, 0.6};
        theta.pi = {0.7, 0.3, 0.2, 0.8, 0.5, 0.5, 0.9, 0.1};
        double sum = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                sum += theta.alpha[a] * theta.alpha[b] * theta.prob(a, b, 1) * theta.prob(b, a, 0);
        CHECK(exact_log_likelihood(g, theta) == Approx(std::log(sum)).epsilon(1e-14));
    }

    TEST_CASE("enumeration agrees with plain counting order")
    {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 30; ++trial) {
            const int Q = 1 + static_cast<int>(rng() % 4);
            const std::size_t n = 2 + rng() % (Q == 4 ? 5 : 7);
            const int K = 1 + static_cast<int>(rng() % 2);
            const auto g = testing::random_graph(n, K, rng);
            const auto theta = testing::random_theta(Q, K, rng);
            const double exact = exact_log_likelihood(g, theta);
            CHECK(exact == Approx(testing::ref_exact_loglik(g, theta)).epsilon(1e-12));

            std::vector<int> perm(static_cast<std::size_t>(Q));
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            CHECK(exact_log_likelihood(g, theta.permuted(perm)) == Approx(exact).epsilon(1e-12));
        }
    }

    TEST_CASE("agreement with a Monte-Carlo estimate over prior draws")
    {
        std::mt19937_64 rng(3);
        const auto theta = testing::random_theta(2, 1, rng);
        const auto g = sample_sbm(theta, 6, 4).graph;
        const double exact = exact_log_likelihood(g, theta);

        // L = E_prior[ p(X | Z) ]; the estimate and its standard error are computed on the scale exp(. - exact)
        const int draws = 1'000'000;
        double mean = 0.0, m2 = 0.0;
        std::vector<int> z(6);
        PhiloxEngine engine(77, Stream::restart_init, 0);
        for (int t = 0; t < draws; ++t) {
            for (auto& x : z) x = engine.uniform() < theta.alpha[0] ? 0 : 1;
            double ll = 0.0;
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j)
                    if (i != j) ll += std::log(theta.prob(z[i], z[j], g.word(i, j)));
            const double x = std::exp(ll - exact);
            const double delta = x - mean;
            mean += delta / (t + 1);
            m2 += delta * (x - mean);
        }
        const double se = std::sqrt(m2 / (draws - 1) / draws);
        CHECK(std::abs(mean - 1.0) < 3 * se);
    }

    TEST_CASE("posterior table")
    {
        std::mt19937_64 rng(5);
        const auto g = testing::random_graph(5, 2, rng);
        const auto theta = testing::random_theta(3, 2, rng);
        const auto post = exact_posterior(g, theta);
        CHECK(std::accumulate(post.probs.begin(), post.probs.end(), 0.0) == Approx(1.0).epsilon(1e-12));
        CHECK(post.probs.size() == 243);
        CHECK(post.log_likelihood == Approx(exact_log_likelihood(g, theta)).epsilon(1e-13));
        for (std::size_t i = 0; i < 5; ++i) {
            double s = 0.0;
            for (int q = 0; q < 3; ++q) s += post.marginal(i, q);
            CHECK(s == Approx(1.0).epsilon(1e-12));
        }
        // a posterior probability is the normalised complete likelihood of its assignment
        const auto z = post.decode(100);
        CHECK(post.probs[100] == Approx(std::exp(complete_log_likelihood(g, z, theta) - post.log_likelihood)).epsilon(1e-10));
    }

    TEST_CASE("an uninformative graph leaves the prior")
    {
        BlockParameters theta(2, 1);
        theta.alpha = {0.3, 0.7};
        const MultiplexGraph empty(4, 1);
        const auto post = exact_posterior(empty, theta);
        for (std::uint64_t idx = 0; idx < post.probs.size(); ++idx) {
            double prior = 1.0;
            for (int z : post.decode(idx)) prior *= theta.alpha[z];
            CHECK(post.probs[idx] == Approx(prior).epsilon(1e-12));
        }

        // factorised posterior: tau equal to the prior has zero KL and a tight bound
        std::mt19937_64 rng(6);
        const auto g = testing::random_graph(5, 2, rng);
        BlockParameters flat(2, 2);
        flat.alpha = {0.25, 0.75};
        const VariationalPosterior prior(5, 2, {0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25, 0.75});
        const auto check = kl_decomposition_check(g, prior, flat);
        CHECK(std::abs(check.kl) < 1e-12);
        CHECK(check.elbo == Approx(check.log_likelihood).epsilon(1e-12));
    }

    TEST_CASE("the posterior mode is the planted labelling")
    {
        BlockParameters theta(2, 1);
        theta.alpha = {0.5, 0.5};
        theta.pi = {0.05, 0.95, 0.95, 0.05, 0.95, 0.05, 0.05, 0.95};
        const std::vector<int> planted{0, 0, 1, 1};
        std::vector<Word> words(16, 0);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                if (i != j && planted[i] == planted[j]) words[i * 4 + j] = 1;
        const MultiplexGraph g(4, 1, words);
        const auto post = exact_posterior(g, theta);
        const auto mode = post.decode(post.mode());
        const bool same = mode == planted;
        const bool swapped = mode == std::vector<int>{1, 1, 0, 0};
        CHECK((same || swapped));
    }

    TEST_CASE("KL decomposition holds on random instances")
    {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            const auto g = testing::random_graph(5, 2, rng);
            const auto theta = testing::random_theta(2, 2, rng);
            const auto tau = testing::random_tau(5, 2, rng);
            const auto check = kl_decomposition_check(g, tau, theta);
            CHECK(check.residual < 1e-8);
            CHECK(check.kl >= -1e-12);
            CHECK(check.elbo <= check.log_likelihood + 1e-8);
            CHECK(check.elbo == Approx(elbo(g, tau, theta)).epsilon(1e-14));
        }
    }

    TEST_CASE("guards count assignments, not nodes")
    {
        CHECK(assignment_count(2, 10) == 1024);
        CHECK(assignment_count(10, 40) == UINT64_MAX);
        const MultiplexGraph big(24, 1);
        CHECK_THROWS_AS(exact_log_likelihood(big, BlockParameters(2, 1)), TooLargeError);
        const MultiplexGraph eight(8, 1);
        CHECK_NOTHROW(exact_log_likelihood(eight, BlockParameters(4, 1)));
        const MultiplexGraph twenty(20, 1);
        CHECK_THROWS_AS(exact_posterior(twenty, BlockParameters(2, 1)), TooLargeError);
        CHECK_THROWS_AS(kl_decomposition_check(twenty, VariationalPosterior(20, 2), BlockParameters(2, 1)), TooLargeError);
    }
}
