#include "support.hpp"

#include <msbm/error.hpp>

#include <doctest.h>

#include <fstream>
#include <numeric>
#include <sstream>

using namespace msbm;

namespace {

LoadedGraph load_strings(std::size_t n, const std::vector<std::string>& layers)
{
    std::vector<std::vector<Edge>> edges;
    for (const auto& text : layers) {
        std::istringstream in(text);
        auto data = parse_layer(in);
        CHECK(data.nodes == n);
        edges.push_back(std::move(data.edges));
    }
    return graph_from_layers(n, edges);
}

} // namespace

TEST_SUITE("graph")
{
    TEST_CASE("word encoding puts layer 1 in the low bit")
    {
        const std::uint8_t zero[] = {0, 0}, first[] = {1, 0}, both[] = {1, 1};
        CHECK(encode_word(zero, 2) == 0);
        CHECK(encode_word(first, 2) == 1);
        CHECK(encode_word(both, 2) == 3);
        const std::uint8_t wrong[] = {1, 0, 1};
        CHECK_THROWS_AS(encode_word(wrong, 2), DimensionError);
        const std::uint8_t bad[] = {2, 0};
        CHECK_THROWS_AS(encode_word(bad, 2), InputError);
    }

    TEST_CASE("encode and decode are inverse for every word")
    {
        for (int K = 1; K <= 5; ++K)
            for (Word w = 0; w < (1u << K); ++w) {
                const auto bits = decode_word(w, K);
                REQUIRE(bits.size() == static_cast<std::size_t>(K));
                CHECK(encode_word(bits, K) == w);
            }
    }

    TEST_CASE("two empty layers give the zero word everywhere")
    {
        auto loaded = load_strings(3, {"# n=3 base=1\n", "# n=3 base=1\n"});
        for (Word w : loaded.graph.words()) CHECK(w == 0);
    }

    TEST_CASE("edge lists are bit-packed per pair")
    {
        auto loaded = load_strings(3, {"# n=3 base=1\n1\t2\n", "# n=3 base=1\n1\t2\n2\t1\n"});
        const auto& g = loaded.graph;
        CHECK(g.word(0, 1) == 3);
        CHECK(g.word(1, 0) == 2);
        for (auto [i, j] : {std::pair{0, 2}, {2, 0}, {1, 2}, {2, 1}}) CHECK(g.word(i, j) == 0);

        const auto counts = word_counts(g);
        CHECK(counts == std::vector<std::uint64_t>{4, 0, 1, 1});

        const auto deg = degree_stats(g, 2);
        CHECK(deg.out == std::vector<std::size_t>{1, 1, 0});
        CHECK(deg.in == std::vector<std::size_t>{1, 1, 0});
    }

    TEST_CASE("self-loops are dropped and counted, duplicates are idempotent")
    {
        auto loaded = load_strings(3, {"# n=3 base=1\n2\t2\n1\t3\n1\t3\n"});
        CHECK(loaded.report.self_loops_dropped == 1);
        CHECK(loaded.report.duplicate_edges == 1);
        CHECK(loaded.graph.word(0, 2) == 1);
        CHECK(loaded.graph.word(1, 1) == 0);
    }

    TEST_CASE("zero-based edge lists and matrices load to the same graph")
    {
        auto a = load_strings(3, {"# n=3 base=0\n0\t1\n2\t0\n"});
        auto b = load_strings(3, {"0,1,0\n0,0,0\n1,0,0\n"});
        CHECK(a.graph == b.graph);
    }

    TEST_CASE("malformed layers are rejected")
    {
        std::istringstream out_of_range("# n=3 base=1\n1\t4\n");
        CHECK_THROWS_AS(parse_layer(out_of_range), InputError);
        std::istringstream zero_in_one_based("# n=3 base=1\n0\t1\n");
        CHECK_THROWS_AS(parse_layer(zero_in_one_based), InputError);
        std::istringstream not_binary("0,2\n1,0\n");
        CHECK_THROWS_AS(parse_layer(not_binary), InputError);
        std::istringstream ragged("0,1\n1\n");
        CHECK_THROWS_AS(parse_layer(ragged), InputError);
    }

    TEST_CASE("layers with different n are rejected")
    {
        const auto dir = testing::temp_dir("graph_n");
        std::ofstream(dir / "a.tsv") << "# n=3 base=1\n1\t2\n";
        std::ofstream(dir / "b.tsv") << "# n=4 base=1\n1\t2\n";
        const std::vector<std::filesystem::path> files{dir / "a.tsv", dir / "b.tsv"};
        CHECK_THROWS_AS(load_layers(files), InputError);
        const std::vector<std::filesystem::path> missing{dir / "nope.tsv"};
        CHECK_THROWS_AS(load_layers(missing), InputError);
    }

    TEST_CASE("edge order does not matter")
    {
        auto a = load_strings(4, {"# n=4 base=1\n1\t2\n3\t4\n4\t1\n2\t3\n"});
        auto b = load_strings(4, {"# n=4 base=1\n2\t3\n4\t1\n1\t2\n3\t4\n"});
        CHECK(a.graph == b.graph);
    }

    TEST_CASE("word counts")
    {
        MultiplexGraph empty(3, 1);
        CHECK(word_counts(empty) == std::vector<std::uint64_t>{6, 0});

        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + rng() % 10;
            const int K = 1 + static_cast<int>(rng() % 3);
            const auto g = testing::random_graph(n, K, rng);
            const auto counts = word_counts(g);
            CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == n * (n - 1));

            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            CHECK(word_counts(g.permuted(perm)) == counts);
        }
    }

    TEST_CASE("degrees")
    {
        MultiplexGraph empty(4, 2);
        CHECK(degree_stats(empty, 1).in == std::vector<std::size_t>(4, 0));

        std::vector<Word> full(16, 1);
        MultiplexGraph complete(4, 1, full);
        const auto deg = degree_stats(complete, 1);
        CHECK(deg.in == std::vector<std::size_t>(4, 3));
        CHECK(deg.out == std::vector<std::size_t>(4, 3));

        CHECK_THROWS_AS(degree_stats(complete, 0), InputError);
        CHECK_THROWS_AS(degree_stats(complete, 2), InputError);
    }

    TEST_CASE("graph construction checks")
    {
        CHECK_THROWS(MultiplexGraph(1, 1));
        CHECK_THROWS(MultiplexGraph(3, 0));
        CHECK_THROWS(MultiplexGraph(3, 17));
        CHECK_THROWS(MultiplexGraph(2, 1, std::vector<Word>{0, 2, 0, 0}));
        CHECK_THROWS(MultiplexGraph(2, 1, std::vector<Word>{0, 1, 0}));
        // diagonal content is discarded
        MultiplexGraph g(2, 1, std::vector<Word>{1, 1, 0, 1});
        CHECK(g.word(0, 0) == 0);
        CHECK(g.word(1, 1) == 0);
    }

    TEST_CASE("node permutation moves words with their endpoints")
    {
        auto g = testing::make_graph(3, 2, {{0, 1, 3}, {2, 0, 1}});
        const std::vector<std::size_t> perm{2, 0, 1};
        const auto p = g.permuted(perm);
        CHECK(p.word(2, 0) == 3);
        CHECK(p.word(1, 2) == 1);
    }

    TEST_CASE("covariate files")
    {
        std::istringstream good("src\tdst\ty1\ty2\n1\t2\t0.5\t1\n2\t1\t-1\t2\n");
        const auto cov = parse_covariates(good, 2);
        CHECK(cov.dim() == 2);
        CHECK(cov.at(0, 1)[0] == 0.5);
        CHECK(cov.at(1, 0)[1] == 2.0);

        std::istringstream missing("src\tdst\ty1\n1\t2\t0.5\n");
        CHECK_THROWS_AS(parse_covariates(missing, 2), InputError);
        std::istringstream not_finite("src\tdst\ty1\n1\t2\tnan\n2\t1\t0\n");
        CHECK_THROWS_AS(parse_covariates(not_finite, 2), InputError);
        std::istringstream bad_header("a\tb\ty1\n");
        CHECK_THROWS_AS(parse_covariates(bad_header, 2), InputError);
    }
}
