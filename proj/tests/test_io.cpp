#include "support.hpp"

#include <msbm/error.hpp>
#include <msbm/io.hpp>
#include <msbm/selection.hpp>
#include <msbm/simulate.hpp>

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace msbm;

TEST_SUITE("io")
{
    TEST_CASE("parameters round-trip through JSON")
    {
        std::mt19937_64 rng(1);
        const auto theta = testing::random_theta(3, 2, rng);
        const auto doc = to_json(theta);
        CHECK(doc["pi"][1][2].size() == 4);
        CHECK(doc["pi"][1][2][3].get<double>() == theta.prob(1, 2, 3));
        const auto back = block_parameters_from_json(json::parse(doc.dump()));
        CHECK(back.alpha == theta.alpha);
        CHECK(back.pi == theta.pi);

        auto broken = doc;
        broken["pi"][0].erase(0);
        CHECK_THROWS_AS(block_parameters_from_json(broken), InputError);
        broken = doc;
        broken.erase("alpha");
        CHECK_THROWS_AS(block_parameters_from_json(broken), InputError);
    }

    TEST_CASE("fit results round-trip and reproduce their ICL")
    {
        const auto s = sample_sbm(testing::planted_theta(), 40, 2);
        FitConfig config;
        config.seed = 5;
        const auto result = fit(s.graph, 2, config);
        const double value = icl(s.graph, result);
        const auto text = fit_result_to_json(result, 40, value).dump(2);
        const auto doc = json::parse(text);
        CHECK(doc["map_assignment"][0].get<int>() == result.map[0] + 1);
        CHECK(doc["icl"].get<double>() == value);
        const auto back = fit_result_from_json(doc);
        CHECK(back.theta.pi == result.theta.pi);
        CHECK(back.map == result.map);
        CHECK(back.elbo_trace == result.elbo_trace);
        CHECK(icl(s.graph, back) == value);
        CHECK(std::equal(back.tau.values().begin(), back.tau.values().end(), result.tau.values().begin()));
    }

    TEST_CASE("covariate models round-trip")
    {
        CovariateBlockParameters theta(2, 2, 3);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        for (auto& c : theta.cells) {
            for (double& x : c.mu) x = normal(rng);
            for (double& x : c.beta) x = normal(rng);
        }
        theta.alpha = {0.25, 0.75};
        const auto back = covariate_block_parameters_from_json(json::parse(to_json(theta).dump()));
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(back.cells[c].mu == theta.cells[c].mu);
            CHECK(back.cells[c].beta == theta.cells[c].beta);
        }
        const ErParameters er{2, {0.1, 0.2, 0.3, 0.4}};
        CHECK(er_parameters_from_json(to_json(er)).pi == er.pi);
    }

    TEST_CASE("edge list and covariate writers feed the readers")
    {
        const auto s = sample_sbm(testing::planted_theta(), 25, 4);
        std::vector<std::vector<Edge>> layers;
        for (int k = 1; k <= 2; ++k) {
            std::istringstream in(edge_list_tsv(s.graph, k));
            layers.push_back(parse_layer(in).edges);
        }
        CHECK(graph_from_layers(25, layers).graph == s.graph);

        const auto cov = sample_covariates(6, 2, 5);
        std::istringstream in(covariates_tsv(cov));
        const auto back = parse_covariates(in, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                if (i != j) CHECK(std::equal(back.at(i, j).begin(), back.at(i, j).end(), cov.at(i, j).begin()));
    }

    TEST_CASE("numbers keep 17 significant digits")
    {
        CHECK(format_number(0.1) == "0.10000000000000001");
        CHECK(format_number(2.0) == "2");
        const double x = 1.0 / 3.0;
        CHECK(std::stod(format_number(x)) == x);
    }

    TEST_CASE("atomic writes replace the target")
    {
        const auto dir = testing::temp_dir("io_atomic");
        const auto path = dir / "out.json";
        write_file_atomic(path, "first");
        write_file_atomic(path, "second");
        std::ifstream in(path);
        std::string content((std::istreambuf_iterator<char>(in)), {});
        CHECK(content == "second");
        CHECK_FALSE(std::filesystem::exists(dir / "out.json.tmp"));
        CHECK_THROWS_AS(read_json(dir / "missing.json"), InputError);
        std::ofstream(dir / "bad.json") << "{";
        CHECK_THROWS_AS(read_json(dir / "bad.json"), InputError);
    }
}
