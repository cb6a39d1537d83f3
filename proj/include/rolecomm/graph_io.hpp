#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rolecomm {

using NodeId = std::size_t;

struct DirectedEdge {
    NodeId source;
    NodeId target;

    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

struct DegreeVectors {
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
};

/**
 * Immutable unweighted directed graph on nodes [0, n).
 *
 * Edges are stored sorted by (source, target) together with CSR-style
 * out- and in-neighbour lists, so adjacency queries are cheap and the
 * matrix-vector products used for path counting run in O(|E|).
 */
class DirectedGraph {
public:
    /// Throws ConfigError on out-of-range endpoints, duplicate edges, or a
    /// label vector whose size differs from n (an empty label vector gets
    /// the decimal indices as labels).
    DirectedGraph(std::size_t n, std::vector<DirectedEdge> edges,
                  std::vector<std::string> labels = {});

    std::size_t size() const { return n_; }
    std::size_t edgeCount() const { return edges_.size(); }

    std::span<const DirectedEdge> edges() const { return edges_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(NodeId u) const { return labels_[u]; }

    std::span<const NodeId> outNeighbors(NodeId u) const {
        return {outTargets_.data() + outOffsets_[u], outOffsets_[u + 1] - outOffsets_[u]};
    }
    std::span<const NodeId> inNeighbors(NodeId v) const {
        return {inSources_.data() + inOffsets_[v], inOffsets_[v + 1] - inOffsets_[v]};
    }

    bool hasEdge(NodeId u, NodeId v) const;
    std::size_t selfLoopCount() const;

private:
    std::size_t n_;
    std::vector<DirectedEdge> edges_;
    std::vector<std::string> labels_;
    std::vector<std::size_t> outOffsets_, inOffsets_;
    std::vector<NodeId> outTargets_, inSources_;
};

DegreeVectors degrees(const DirectedGraph& g);

struct ParseOptions {
    /// Fixes node order and admits isolated nodes. When set, every edge
    /// endpoint must be one of these labels.
    std::optional<std::vector<std::string>> nodeLabels;
};

struct ParseWarnings {
    std::size_t duplicateEdges = 0;
    std::size_t selfLoops = 0;
    std::size_t ignoredWeights = 0;

    bool any() const { return duplicateEdges + selfLoops + ignoredWeights > 0; }
};

struct ParsedGraph {
    DirectedGraph graph;
    ParseWarnings warnings;
};

/**
 * Reads a whitespace- or comma-separated edge list. Lines starting with
 * '#' and blank lines are skipped; a third numeric column is accepted and
 * ignored. Node indices follow first appearance of each token unless
 * ParseOptions::nodeLabels fixes them. Throws ParseError with the line
 * number on malformed input.
 */
ParsedGraph parseEdgeList(std::istream& in, const ParseOptions& options = {});
ParsedGraph parseEdgeList(std::string_view text, const ParseOptions& options = {});
ParsedGraph readEdgeListFile(const std::string& path, const ParseOptions& options = {});

/// One label per non-blank line; '#' comments allowed.
std::vector<std::string> parseNodeLabels(std::istream& in);
std::vector<std::string> readNodeLabelsFile(const std::string& path);

/// Writes "source target" label pairs, one edge per line, in stored order.
void writeEdgeList(std::ostream& out, const DirectedGraph& g);

/// Splits one data line into fields: either on single commas (fields
/// trimmed) or, when no comma is present, on runs of spaces/tabs.
std::vector<std::string_view> splitFields(std::string_view line);

} // namespace rolecomm
