#include "summarize.hpp"

#include <msbm/error.hpp>
#include <msbm/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

namespace msbm::cli {

namespace {

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, '\t')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    return fields;
}

bool parse_double(const std::string& s, double& value)
{
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    return ec == std::errc{} && ptr == end && std::isfinite(value);
}

std::string file_stem(const std::string& name)
{
    std::string out;
    for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

std::vector<int> occupied_blocks(const Assignment& map)
{
    std::vector<int> blocks(map.begin(), map.end());
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    return blocks;
}

void write_quartiles(std::ostringstream& out, const Quartiles& s)
{
    out << s.count << ',' << format_number(s.min) << ',' << format_number(s.q1) << ',' << format_number(s.median) << ','
        << format_number(s.q3) << ',' << format_number(s.max) << '\n';
}

} // namespace

Quartiles quartiles(std::vector<double> values)
{
    Quartiles s;
    s.count = values.size();
    if (values.empty()) {
        s.min = s.q1 = s.median = s.q3 = s.max = std::nan("");
        return s;
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double h = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    s.min = values.front();
    s.q1 = at(0.25);
    s.median = at(0.5);
    s.q3 = at(0.75);
    s.max = values.back();
    return s;
}

AttributeTable parse_attributes(std::istream& in, std::size_t n)
{
    AttributeTable table;
    std::string line;
    if (!std::getline(in, line)) throw InputError("attribute file is empty");
    auto header = split_tabs(line);
    if (header.size() < 2) throw InputError("attribute header needs a node column and at least one attribute");
    table.columns.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_tabs(line);
        const auto& id = fields[0];
        std::size_t node = 0;
        const auto* end = id.data() + id.size();
        auto [ptr, ec] = std::from_chars(id.data(), end, node);
        if (ec != std::errc{} || ptr != end || node < 1 || node > n) {
            table.unknown_ids.push_back(id);
            continue;
        }
        fields.resize(header.size());
        table.nodes.push_back(node - 1);
        table.values.emplace_back(fields.begin() + 1, fields.end());
    }
    return table;
}

CsvSet summarize(const Assignment& map, const AttributeTable* attributes, const std::set<std::string>& categorical,
                 const MultiplexGraph* graph)
{
    CsvSet files;
    const auto blocks = occupied_blocks(map);

    {
        std::map<int, std::size_t> sizes;
        for (int z : map) ++sizes[z];
        std::ostringstream out;
        out << "block,size\n";
        for (int b : blocks) out << b + 1 << ',' << sizes[b] << '\n';
        files.emplace_back("block_sizes.csv", out.str());
    }

    if (attributes != nullptr) {
        for (std::size_t c = 0; c < attributes->columns.size(); ++c) {
            const auto& name = attributes->columns[c];
            bool numeric = !categorical.contains(name);
            std::vector<std::pair<int, std::string>> observed; // (block, raw value)
            for (std::size_t r = 0; r < attributes->nodes.size(); ++r) {
                const auto& v = attributes->values[r][c];
                if (v.empty()) continue;
                double x;
                if (!parse_double(v, x)) numeric = false;
                observed.emplace_back(map[attributes->nodes[r]], v);
            }

            std::ostringstream out;
            if (numeric) {
                out << "block,count,min,q1,median,q3,max\n";
                for (int b : blocks) {
                    std::vector<double> xs;
                    for (const auto& [z, v] : observed)
                        if (z == b) {
                            double x;
                            parse_double(v, x);
                            xs.push_back(x);
                        }
                    out << b + 1 << ',';
                    write_quartiles(out, quartiles(std::move(xs)));
                }
                files.emplace_back("numeric_" + file_stem(name) + ".csv", out.str());
                continue;
            }

            std::vector<std::string> categories;
            for (const auto& o : observed) categories.push_back(o.second);
            bool all_numbers = true;
            for (const auto& v : categories) {
                double x;
                all_numbers = all_numbers && parse_double(v, x);
            }
            std::sort(categories.begin(), categories.end(), [&](const std::string& a, const std::string& b) {
                if (!all_numbers) return a < b;
                double x, y;
                parse_double(a, x);
                parse_double(b, y);
                return x < y || (x == y && a < b);
            });
            categories.erase(std::unique(categories.begin(), categories.end()), categories.end());

            std::map<std::pair<int, std::string>, std::size_t> counts;
            for (const auto& o : observed) ++counts[o];
            out << "block";
            for (const auto& cat : categories) out << ',' << cat;
            out << '\n';
            for (int b : blocks) {
                out << b + 1;
                for (const auto& cat : categories) {
                    auto it = counts.find({b, cat});
                    out << ',' << (it == counts.end() ? 0 : it->second);
                }
                out << '\n';
            }
            files.emplace_back("crosstab_" + file_stem(name) + ".csv", out.str());
        }
    }

    if (graph != nullptr) {
        if (graph->size() != map.size()) throw DimensionError("graph and fit disagree on the number of nodes");
        std::ostringstream out;
        out << "block,layer,direction,count,min,q1,median,q3,max\n";
        for (int layer = 1; layer <= graph->layers(); ++layer) {
            const auto deg = degree_stats(*graph, layer);
            for (int b : blocks) {
                for (const auto& [direction, values] : {std::pair{"in", &deg.in}, std::pair{"out", &deg.out}}) {
                    std::vector<double> xs;
                    for (std::size_t i = 0; i < map.size(); ++i)
                        if (map[i] == b) xs.push_back(static_cast<double>((*values)[i]));
                    out << b + 1 << ',' << layer << ',' << direction << ',';
                    write_quartiles(out, quartiles(std::move(xs)));
                }
            }
        }
        files.emplace_back("degrees.csv", out.str());
    }
    return files;
}

} // namespace msbm::cli
