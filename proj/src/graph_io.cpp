#include "rolecomm/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rolecomm/error.hpp"

namespace rolecomm {

DirectedGraph::DirectedGraph(std::size_t n, std::vector<DirectedEdge> edges,
                             std::vector<std::string> labels)
    : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
    for (const auto& e : edges_) {
        if (e.source >= n_ || e.target >= n_)
            throw ConfigError("edge endpoint out of range [0, " + std::to_string(n_) + ")");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw ConfigError("duplicate edge in graph");

    if (labels_.empty()) {
        labels_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i)
            labels_.push_back(std::to_string(i));
    } else if (labels_.size() != n_) {
        throw ConfigError("label count " + std::to_string(labels_.size())
                          + " does not match node count " + std::to_string(n_));
    }

    outOffsets_.assign(n_ + 1, 0);
    inOffsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
        ++outOffsets_[e.source + 1];
        ++inOffsets_[e.target + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) {
        outOffsets_[i + 1] += outOffsets_[i];
        inOffsets_[i + 1] += inOffsets_[i];
    }
    outTargets_.resize(edges_.size());
    inSources_.resize(edges_.size());
    std::vector<std::size_t> inFill(inOffsets_.begin(), inOffsets_.end() - 1);
    // edges_ is sorted by source, so both lists end up sorted.
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        outTargets_[k] = edges_[k].target;
        inSources_[inFill[edges_[k].target]++] = edges_[k].source;
    }
}

bool DirectedGraph::hasEdge(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_)
        return false;
    auto nbrs = outNeighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::size_t DirectedGraph::selfLoopCount() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(),
                      [](const DirectedEdge& e) { return e.source == e.target; }));
}

DegreeVectors degrees(const DirectedGraph& g) {
    DegreeVectors d;
    d.in.resize(g.size());
    d.out.resize(g.size());
    for (NodeId u = 0; u < g.size(); ++u) {
        d.out[u] = g.outNeighbors(u).size();
        d.in[u] = g.inNeighbors(u).size();
    }
    return d;
}

namespace {

bool isBlank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && isBlank(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && isBlank(s.back()))
        s.remove_suffix(1);
    return s;
}

bool isNumeric(std::string_view s) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool skipLine(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

} // namespace

std::vector<std::string_view> splitFields(std::string_view line) {
    std::vector<std::string_view> fields;
    line = trim(line);
    if (line.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            fields.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return fields;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && isBlank(line[i]))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !isBlank(line[j]))
            ++j;
        if (j > i)
            fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

ParsedGraph parseEdgeList(std::istream& in, const ParseOptions& options) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> index;
    const bool fixedNodes = options.nodeLabels.has_value();
    if (fixedNodes) {
        labels = *options.nodeLabels;
        for (NodeId i = 0; i < labels.size(); ++i) {
            if (!index.emplace(labels[i], i).second)
                throw ParseError("duplicate node label '" + labels[i] + "' in nodes file");
        }
    }

    ParseWarnings warnings;
    std::vector<DirectedEdge> edges;
    std::unordered_set<std::uint64_t> seen;
    bool sawData = false;

    auto lookup = [&](std::string_view token, std::size_t lineNo) -> NodeId {
        std::string key(token);
        if (auto it = index.find(key); it != index.end())
            return it->second;
        if (fixedNodes)
            throw ParseError("line " + std::to_string(lineNo) + ": node '" + key
                             + "' is not declared in the nodes file");
        NodeId id = labels.size();
        index.emplace(key, id);
        labels.push_back(std::move(key));
        return id;
    };

    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (skipLine(line))
            continue;
        auto fields = splitFields(line);
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError("line " + std::to_string(lineNo) + ": expected 2 or 3 fields, got "
                             + std::to_string(fields.size()));
        for (auto f : fields) {
            if (f.empty())
                throw ParseError("line " + std::to_string(lineNo) + ": empty field");
        }
        if (fields.size() == 3) {
            if (!isNumeric(fields[2]))
                throw ParseError("line " + std::to_string(lineNo) + ": third field '"
                                 + std::string(fields[2]) + "' is not numeric");
            ++warnings.ignoredWeights;
        }
        sawData = true;
        NodeId u = lookup(fields[0], lineNo);
        NodeId v = lookup(fields[1], lineNo);
        // Node counts are far below 2^32, so the pair packs into one key.
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
        if (!seen.insert(key).second) {
            ++warnings.duplicateEdges;
            continue;
        }
        if (u == v)
            ++warnings.selfLoops;
        edges.push_back({u, v});
    }
    if (!sawData && !fixedNodes)
        throw ParseError("edge list is empty");
    if (labels.empty())
        throw ParseError("graph has no nodes");

    std::size_t n = labels.size();
    return {DirectedGraph(n, std::move(edges), std::move(labels)), warnings};
}

ParsedGraph parseEdgeList(std::string_view text, const ParseOptions& options) {
    std::istringstream in{std::string(text)};
    return parseEdgeList(in, options);
}

ParsedGraph readEdgeListFile(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open edge list '" + path + "'");
    return parseEdgeList(in, options);
}

std::vector<std::string> parseNodeLabels(std::istream& in) {
    std::vector<std::string> labels;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (skipLine(line))
            continue;
        auto label = trim(line);
        if (label.find_first_of(" \t,") != std::string_view::npos)
            throw ParseError("nodes file line " + std::to_string(lineNo)
                             + ": label contains a separator character");
        labels.emplace_back(label);
    }
    return labels;
}

std::vector<std::string> readNodeLabelsFile(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open nodes file '" + path + "'");
    return parseNodeLabels(in);
}

void writeEdgeList(std::ostream& out, const DirectedGraph& g) {
    for (const auto& e : g.edges())
        out << g.label(e.source) << ' ' << g.label(e.target) << '\n';
}

} // namespace rolecomm
