#pragma once

#include "msbm/er.hpp"
#include "msbm/graph.hpp"
#include "msbm/model.hpp"
#include "msbm/selection.hpp"
#include "msbm/vem.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace msbm {

using json = nlohmann::ordered_json;

// Parameter documents use pi[q][l][w] with word index w = sum_k x_k 2^(k-1).
json to_json(const BlockParameters& theta);
BlockParameters block_parameters_from_json(const json& doc);

json to_json(const ErParameters& er);
ErParameters er_parameters_from_json(const json& doc);

json to_json(const CovariateModel& model);
CovariateModel covariate_model_from_json(const json& doc);

json to_json(const CovariateBlockParameters& theta);
CovariateBlockParameters covariate_block_parameters_from_json(const json& doc);

json to_json(const GlmFit& fit);

/// {Q, K, n, alpha, pi, tau, map_assignment, elbo_trace, icl, converged, flags, seed}; labels are 1-based.
json fit_result_to_json(const FitResult& fit, std::size_t n, double icl_value);
FitResult fit_result_from_json(const json& doc);

json covariate_fit_to_json(const CovariateFitResult& fit, std::size_t n, double icl_value);

json to_json(const IclReport& report);

/// Ground truth of a simulation: {n, seed, theta, z} with 1-based labels.
json truth_to_json(const BlockParameters& theta, const Assignment& z, std::uint64_t seed);
Assignment labels_from_json(const json& array); // 1-based -> 0-based

json read_json(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Edge list of one layer with header `# n=<n> base=<base>`.
std::string edge_list_tsv(const MultiplexGraph& g, int layer, int base = 1);

/// `src dst y1 ... yd` TSV covering every ordered pair.
std::string covariates_tsv(const EdgeCovariates& cov, int base = 1);

/// 17 significant digits.
std::string format_number(double v);

} // namespace msbm
