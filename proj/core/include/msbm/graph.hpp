#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace msbm {

/// Index of an edge word: bit k-1 holds the value of layer k.
using Word = std::uint16_t;

inline constexpr int kMaxLayers = 16;

/// Packs one binary value per layer into a word index (layer 1 is the low bit).
Word encode_word(std::span<const std::uint8_t> layer_values, int layers);

/// Inverse of encode_word.
std::vector<std::uint8_t> decode_word(Word word, int layers);

inline bool word_bit(Word word, int layer) noexcept // layer is 1-based
{
    return (word >> (layer - 1)) & 1U;
}

/**
 * Directed multiplex network over n nodes with K binary layers.
 *
 * Stored densely as n*n edge words. The diagonal is kept at zero and never
 * read by any likelihood computation. Instances are immutable.
 */
class MultiplexGraph
{
public:
    /// Empty graph (every pair carries word 0).
    MultiplexGraph(std::size_t nodes, int layers);

    /// Takes ownership of a row-major n*n word array; diagonal entries are ignored.
    MultiplexGraph(std::size_t nodes, int layers, std::vector<Word> words);

    std::size_t size() const noexcept { return n_; }
    int layers() const noexcept { return layers_; }
    std::size_t num_words() const noexcept { return std::size_t{1} << layers_; }
    std::size_t num_pairs() const noexcept { return n_ * (n_ - 1); }

    Word word(std::size_t i, std::size_t j) const noexcept { return words_[i * n_ + j]; }
    std::span<const Word> row(std::size_t i) const noexcept { return {words_.data() + i * n_, n_}; }
    std::span<const Word> words() const noexcept { return words_; }

    bool has_edge(std::size_t i, std::size_t j, int layer) const noexcept
    {
        return word_bit(word(i, j), layer);
    }

    /// Relabels nodes: node i of this graph becomes node perm[i] of the result.
    MultiplexGraph permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const MultiplexGraph&, const MultiplexGraph&) = default;

private:
    std::size_t n_;
    int layers_;
    std::vector<Word> words_;
};

/// Real covariate vector of fixed dimension d for every ordered pair.
class EdgeCovariates
{
public:
    EdgeCovariates(std::size_t nodes, std::size_t dim);
    EdgeCovariates(std::size_t nodes, std::size_t dim, std::vector<double> values);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }

    std::span<const double> at(std::size_t i, std::size_t j) const noexcept
    {
        return {values_.data() + (i * n_ + j) * d_, d_};
    }
    std::span<double> at(std::size_t i, std::size_t j) noexcept
    {
        return {values_.data() + (i * n_ + j) * d_, d_};
    }

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<double> values_;
};

// Loading --------------------------------------------------------------------

using Edge = std::pair<std::size_t, std::size_t>;

/// One layer as read from disk, already converted to 0-based node ids.
struct LayerData
{
    std::size_t nodes = 0;
    std::vector<Edge> edges;
};

struct LoadReport
{
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges = 0;
};

struct LoadedGraph
{
    MultiplexGraph graph;
    LoadReport report;
};

/**
 * Parses one layer. Two formats are accepted:
 *  - an edge list whose first line is `# n=<int> base=<0|1>`, followed by
 *    `src<TAB>dst` rows;
 *  - an n*n matrix of 0/1 entries separated by commas.
 */
LayerData parse_layer(std::istream& in, const std::string& source_name = "<stream>");

/// Builds a graph from per-layer edge lists (0-based). Layer k of the input becomes bit k-1.
LoadedGraph graph_from_layers(std::size_t nodes, std::span<const std::vector<Edge>> layers);

/// Reads and combines layer files. All layers must agree on n.
LoadedGraph load_layers(std::span<const std::filesystem::path> files);

/// Reads a TSV with header `src dst y1 ... yd`; every ordered pair i != j must be present.
EdgeCovariates load_covariates(const std::filesystem::path& file, std::size_t nodes, int base = 1);
EdgeCovariates parse_covariates(std::istream& in, std::size_t nodes, int base = 1);

// Summaries ------------------------------------------------------------------

/// Number of ordered pairs i != j carrying each word; sums to n(n-1).
std::vector<std::uint64_t> word_counts(const MultiplexGraph& g);

struct DegreeStats
{
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
};

/// In- and out-degrees on layer `layer` (1-based).
DegreeStats degree_stats(const MultiplexGraph& g, int layer);

} // namespace msbm
