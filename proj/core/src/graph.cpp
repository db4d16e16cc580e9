#include "msbm/graph.hpp"

#include "msbm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace msbm {

namespace {

void check_layers(int layers)
{
    if (layers < 1 || layers > kMaxLayers)
        throw InputError("layer count must be in [1, " + std::to_string(kMaxLayers) + "], got "
                         + std::to_string(layers));
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(trim(field));
    return out;
}

std::vector<std::string> split_ws(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

long long parse_int(const std::string& s, const std::string& where)
{
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw InputError(where + ": expected an integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& where)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(where + ": expected a number, got '" + s + "'");
    }
}

// Header `# n=<int> base=<0|1>`
std::pair<std::size_t, int> parse_edge_list_header(const std::string& line, const std::string& name)
{
    long long n = -1;
    int base = -1;
    for (const auto& tok : split_ws(line.substr(1))) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto value = tok.substr(eq + 1);
        if (key == "n") n = parse_int(value, name + " header");
        else if (key == "base") base = static_cast<int>(parse_int(value, name + " header"));
    }
    if (n < 2) throw InputError(name + ": header must declare n >= 2");
    if (base != 0 && base != 1) throw InputError(name + ": header must declare base=0 or base=1");
    return {static_cast<std::size_t>(n), base};
}

} // namespace

Word encode_word(std::span<const std::uint8_t> layer_values, int layers)
{
    check_layers(layers);
    if (layer_values.size() != static_cast<std::size_t>(layers))
        throw DimensionError("encode_word: expected " + std::to_string(layers) + " layer values, got "
                             + std::to_string(layer_values.size()));
    Word w = 0;
    for (int k = 0; k < layers; ++k) {
        if (layer_values[k] > 1) throw InputError("encode_word: layer values must be 0 or 1");
        w |= static_cast<Word>(layer_values[k] << k);
    }
    return w;
}

std::vector<std::uint8_t> decode_word(Word word, int layers)
{
    check_layers(layers);
    if (layers < kMaxLayers && (word >> layers) != 0)
        throw InputError("decode_word: word " + std::to_string(word) + " out of range");
    std::vector<std::uint8_t> bits(layers);
    for (int k = 0; k < layers; ++k) bits[k] = (word >> k) & 1U;
    return bits;
}

MultiplexGraph::MultiplexGraph(std::size_t nodes, int layers)
    : n_{nodes}, layers_{layers}, words_(nodes * nodes, Word{0})
{
    check_layers(layers);
    if (nodes < 2) throw InputError("a graph needs at least 2 nodes");
}

MultiplexGraph::MultiplexGraph(std::size_t nodes, int layers, std::vector<Word> words)
    : n_{nodes}, layers_{layers}, words_(std::move(words))
{
    check_layers(layers);
    if (nodes < 2) throw InputError("a graph needs at least 2 nodes");
    if (words_.size() != nodes * nodes)
        throw DimensionError("word array has " + std::to_string(words_.size()) + " entries, expected "
                             + std::to_string(nodes * nodes));
    const auto limit = num_words();
    for (std::size_t i = 0; i < n_; ++i) {
        words_[i * n_ + i] = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (words_[i * n_ + j] >= limit)
                throw InputError("word index " + std::to_string(words_[i * n_ + j]) + " at ("
                                 + std::to_string(i) + "," + std::to_string(j) + ") exceeds 2^K - 1");
    }
}

MultiplexGraph MultiplexGraph::permuted(std::span<const std::size_t> perm) const
{
    if (perm.size() != n_) throw DimensionError("permutation length does not match node count");
    std::vector<Word> out(n_ * n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[perm[i] * n_ + perm[j]] = words_[i * n_ + j];
    return MultiplexGraph(n_, layers_, std::move(out));
}

EdgeCovariates::EdgeCovariates(std::size_t nodes, std::size_t dim)
    : n_{nodes}, d_{dim}, values_(nodes * nodes * dim, 0.0)
{
}

EdgeCovariates::EdgeCovariates(std::size_t nodes, std::size_t dim, std::vector<double> values)
    : n_{nodes}, d_{dim}, values_(std::move(values))
{
    if (values_.size() != n_ * n_ * d_) throw DimensionError("covariate array has the wrong size");
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j)
                for (double v : at(i, j))
                    if (!std::isfinite(v)) throw InputError("covariates must be finite");
}

LayerData parse_layer(std::istream& in, const std::string& name)
{
    std::string line;
    // Skip leading blank lines to find the format marker.
    while (std::getline(in, line) && trim(line).empty()) {
    }
    if (trim(line).empty()) throw InputError(name + ": empty layer file");

    LayerData layer;
    if (trim(line).front() == '#') {
        auto [n, base] = parse_edge_list_header(trim(line), name);
        layer.nodes = n;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            const auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            const auto fields = split_ws(t);
            const auto where = name + ":" + std::to_string(lineno);
            if (fields.size() != 2) throw InputError(where + ": expected 'src<TAB>dst'");
            const auto src = parse_int(fields[0], where) - base;
            const auto dst = parse_int(fields[1], where) - base;
            if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= n || static_cast<std::size_t>(dst) >= n)
                throw InputError(where + ": node index out of range for n=" + std::to_string(n));
            layer.edges.emplace_back(static_cast<std::size_t>(src), static_cast<std::size_t>(dst));
        }
        return layer;
    }

    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 0;
    do {
        ++lineno;
        const auto t = trim(line);
        if (t.empty()) continue;
        rows.push_back(split(t, ','));
    } while (std::getline(in, line));

    const auto n = rows.size();
    if (n < 2) throw InputError(name + ": adjacency matrix needs at least 2 rows");
    layer.nodes = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw InputError(name + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size())
                             + " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) {
            const auto& cell = rows[i][j];
            if (cell == "1") layer.edges.emplace_back(i, j);
            else if (cell != "0")
                throw InputError(name + ": entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1)
                                 + ") must be 0 or 1");
        }
    }
    return layer;
}

LoadedGraph graph_from_layers(std::size_t nodes, std::span<const std::vector<Edge>> layers)
{
    const int K = static_cast<int>(layers.size());
    check_layers(K);
    if (nodes < 2) throw InputError("a graph needs at least 2 nodes");

    LoadReport report;
    std::vector<Word> words(nodes * nodes, 0);
    for (int k = 0; k < K; ++k) {
        const Word bit = static_cast<Word>(1U << k);
        for (auto [src, dst] : layers[k]) {
            if (src >= nodes || dst >= nodes)
                throw InputError("edge (" + std::to_string(src) + "," + std::to_string(dst)
                                 + ") has a node index >= n=" + std::to_string(nodes));
            if (src == dst) {
                ++report.self_loops_dropped;
                continue;
            }
            auto& w = words[src * nodes + dst];
            if (w & bit) ++report.duplicate_edges;
            w |= bit;
        }
    }
    return {MultiplexGraph(nodes, K, std::move(words)), report};
}

LoadedGraph load_layers(std::span<const std::filesystem::path> files)
{
    if (files.empty()) throw InputError("at least one layer file is required");
    std::vector<std::vector<Edge>> layers;
    std::size_t nodes = 0;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open layer file " + path.string());
        auto layer = parse_layer(in, path.string());
        if (nodes == 0) nodes = layer.nodes;
        else if (layer.nodes != nodes)
            throw InputError("inconsistent node count: " + path.string() + " has n=" + std::to_string(layer.nodes)
                             + ", previous layers have n=" + std::to_string(nodes));
        layers.push_back(std::move(layer.edges));
    }
    return graph_from_layers(nodes, layers);
}

EdgeCovariates parse_covariates(std::istream& in, std::size_t nodes, int base)
{
    std::string line;
    if (!std::getline(in, line)) throw InputError("covariate file is empty");
    auto header = split_ws(line);
    if (header.size() < 2 || header[0] != "src" || header[1] != "dst")
        throw InputError("covariate header must start with 'src dst'");
    const auto d = header.size() - 2;

    EdgeCovariates cov(nodes, d);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        const auto where = "covariates:" + std::to_string(lineno);
        if (fields.size() != d + 2) throw InputError(where + ": expected " + std::to_string(d + 2) + " fields");
        const auto i = parse_int(fields[0], where) - base;
        const auto j = parse_int(fields[1], where) - base;
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= nodes || static_cast<std::size_t>(j) >= nodes)
            throw InputError(where + ": node index out of range");
        if (i == j) continue;
        auto slot = cov.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        for (std::size_t k = 0; k < d; ++k) {
            slot[k] = parse_double(fields[k + 2], where);
            if (!std::isfinite(slot[k])) throw InputError(where + ": covariates must be finite");
        }
        seen.emplace(i, j);
    }
    if (seen.size() != nodes * (nodes - 1))
        throw InputError("covariate file covers " + std::to_string(seen.size()) + " ordered pairs, expected "
                         + std::to_string(nodes * (nodes - 1)));
    return cov;
}

EdgeCovariates load_covariates(const std::filesystem::path& file, std::size_t nodes, int base)
{
    std::ifstream in(file);
    if (!in) throw InputError("cannot open covariate file " + file.string());
    return parse_covariates(in, nodes, base);
}

std::vector<std::uint64_t> word_counts(const MultiplexGraph& g)
{
    std::vector<std::uint64_t> counts(g.num_words(), 0);
    const auto n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.row(i);
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) ++counts[row[j]];
    }
    return counts;
}

DegreeStats degree_stats(const MultiplexGraph& g, int layer)
{
    if (layer < 1 || layer > g.layers())
        throw InputError("layer " + std::to_string(layer) + " is not in [1, " + std::to_string(g.layers()) + "]");
    const auto n = g.size();
    DegreeStats stats{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && g.has_edge(i, j, layer)) {
                ++stats.out[i];
                ++stats.in[j];
            }
    return stats;
}

} // namespace msbm
