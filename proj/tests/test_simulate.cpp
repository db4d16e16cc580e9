#include "support.hpp"

#include <msbm/simulate.hpp>

#include <doctest.h>

#include <cmath>

using namespace msbm;

TEST_SUITE("simulate")
{
    TEST_CASE("point-mass ER distributions")
    {
        const auto empty = sample_er({2, {1, 0, 0, 0}}, 20, 1);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) CHECK(empty.word(i, j) == 0);
        const auto full = sample_er({2, {0, 0, 0, 1}}, 20, 1);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) CHECK(full.word(i, j) == (i == j ? 0 : 3));
    }

    TEST_CASE("ER word frequencies are within three binomial errors")
    {
        const std::vector<double> pi{0.4, 0.3, 0.2, 0.1};
        const std::size_t n = 400;
        const auto counts = word_counts(sample_er({2, pi}, n, 2024));
        const double N = static_cast<double>(n * (n - 1));
        for (std::size_t w = 0; w < 4; ++w)
            CHECK(std::abs(static_cast<double>(counts[w]) / N - pi[w]) < 3 * std::sqrt(pi[w] * (1 - pi[w]) / N));
    }

    TEST_CASE("sampling is deterministic in the seed")
    {
        const auto theta = testing::planted_theta();
        const auto a = sample_sbm(theta, 50, 7);
        const auto b = sample_sbm(theta, 50, 7);
        const auto c = sample_sbm(theta, 50, 8);
        CHECK(a.graph == b.graph);
        CHECK(a.truth == b.truth);
        CHECK_FALSE(a.graph == c.graph);
    }

    TEST_CASE("one block reproduces the ER sampler")
    {
        BlockParameters theta(1, 2);
        theta.pi = {0.4, 0.3, 0.2, 0.1};
        const auto sbm = sample_sbm(theta, 30, 11);
        const auto er = sample_er({2, theta.pi}, 30, 11);
        CHECK(sbm.graph == er);
    }

    TEST_CASE("degenerate alpha puts every node in the first block")
    {
        auto theta = testing::planted_theta();
        theta.alpha = {1.0, 0.0};
        const auto s = sample_sbm(theta, 40, 3);
        for (int z : s.truth) CHECK(z == 0);
        BlockParameters one(1, 2);
        one.pi = std::vector<double>(theta.cell(0, 0).begin(), theta.cell(0, 0).end());
        CHECK(s.graph == sample_er({2, one.pi}, 40, 3));
    }

    TEST_CASE("block frequencies and cell word frequencies")
    {
        const auto theta = testing::planted_theta();
        const std::size_t n = 200;
        const auto s = sample_sbm(theta, n, 5);
        std::vector<double> sizes(2, 0.0);
        for (int z : s.truth) sizes[z] += 1;
        for (int q = 0; q < 2; ++q)
            CHECK(std::abs(sizes[q] / n - theta.alpha[q]) < 3 * std::sqrt(theta.alpha[q] * (1 - theta.alpha[q]) / n));

        std::vector<double> counts(16, 0.0), totals(4, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const int c = s.truth[i] * 2 + s.truth[j];
                counts[c * 4 + s.graph.word(i, j)] += 1;
                totals[c] += 1;
            }
        for (int c = 0; c < 4; ++c) {
            REQUIRE(totals[c] >= 500);
            for (std::size_t w = 0; w < 4; ++w) {
                const double p = theta.prob(c / 2, c % 2, w);
                CHECK(std::abs(counts[c * 4 + w] / totals[c] - p) < 3 * std::sqrt(p * (1 - p) / totals[c]));
            }
        }
    }

    TEST_CASE("standard normal covariates")
    {
        const std::size_t n = 150;
        const auto cov = sample_covariates(n, 3, 9);
        double mean = 0.0, sq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                for (double y : cov.at(i, j)) {
                    mean += y;
                    sq += y * y;
                    ++count;
                }
            }
        mean /= count;
        CHECK(std::abs(mean) < 4 / std::sqrt(static_cast<double>(count)));
        CHECK(std::abs(sq / count - 1.0) < 4 * std::sqrt(2.0 / count));
        const auto again = sample_covariates(n, 3, 9);
        CHECK(std::equal(cov.at(3, 4).begin(), cov.at(3, 4).end(), again.at(3, 4).begin()));
    }

    TEST_CASE("random parameters are valid and reproducible")
    {
        const auto a = random_block_parameters(3, 2, 4);
        CHECK_NOTHROW(a.validate());
        CHECK(a.pi == random_block_parameters(3, 2, 4).pi);
        CHECK(a.pi != random_block_parameters(3, 2, 5).pi);
    }

    TEST_CASE("invalid parameters are rejected")
    {
        CHECK_THROWS(sample_er({2, {0.5, 0.5}}, 10, 1));
        CHECK_THROWS(sample_er({1, {0.7, 0.7}}, 10, 1));
        BlockParameters bad(2, 1);
        bad.alpha = {0.9, 0.3};
        CHECK_THROWS(sample_sbm(bad, 10, 1));
    }
}
