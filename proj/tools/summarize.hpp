#pragma once

#include <msbm/graph.hpp>
#include <msbm/model.hpp>

#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace msbm::cli {

struct Quartiles
{
    std::size_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Five-number summary with linear interpolation between order statistics.
Quartiles quartiles(std::vector<double> values);

/// Node attributes keyed by 1-based node id; the header is `node<TAB>name...`.
struct AttributeTable
{
    std::vector<std::string> columns;
    std::vector<std::size_t> nodes; // 0-based, one per kept row
    std::vector<std::vector<std::string>> values;
    std::vector<std::string> unknown_ids;
};

AttributeTable parse_attributes(std::istream& in, std::size_t n);

/// Named CSV documents (file name, content).
using CsvSet = std::vector<std::pair<std::string, std::string>>;

/**
 * Block sizes, block x category cross-tabs, per-block numeric summaries and,
 * when a graph is supplied, per-block in/out degree summaries for every layer.
 * A column is categorical when listed in `categorical` or when any value is
 * not a number.
 */
CsvSet summarize(const Assignment& map, const AttributeTable* attributes, const std::set<std::string>& categorical,
                 const MultiplexGraph* graph);

} // namespace msbm::cli
