#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rolecomm/rbs.hpp"

namespace rolecomm {

struct DissimilarityMatrix {
    Eigen::MatrixXd z;

    std::size_t size() const { return static_cast<std::size_t>(z.rows()); }
};

/// Undirected edge with u < v.
struct UndirectedEdge {
    std::size_t u;
    std::size_t v;

    friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

struct RmstNetwork {
    std::size_t n = 0;
    /// Sorted lexicographically.
    std::vector<UndirectedEdge> edges;
    /// y_ij on each edge, index-aligned with edges; set when the weighted
    /// variant is requested.
    std::optional<std::vector<double>> weights;
    double gamma = 0.0;
    /// Sorted lexicographically; a subset of edges.
    std::vector<UndirectedEdge> mstEdges;
};

DissimilarityMatrix dissimilarity(const SimilarityMatrix& sim);

/**
 * Dense Prim in O(N^2) on the complete graph weighted by z. Edges are
 * compared by (z, u, v), a strict total order, so the tree is unique and
 * ties resolve towards the lexicographically smallest edge.
 * Throws ConfigError when N < 2.
 */
std::vector<UndirectedEdge> minimumSpanningTree(const DissimilarityMatrix& dis);

/**
 * Maximum z-weight on the tree path between every pair of nodes.
 *
 * Tree edges are merged in ascending (z, u, v) order with a union-find
 * that keeps the member list of each component; when an edge of weight w
 * joins components A and B, w is the path maximum for every pair in A x B.
 * Every pair is written exactly once, so the whole matrix costs O(N^2).
 * Throws ConfigError if the edges do not form a spanning tree.
 */
Eigen::MatrixXd mlinkAllPairs(std::span<const UndirectedEdge> tree, const DissimilarityMatrix& dis);

/// d_i = min over k != i of z_ik.
std::vector<double> localScale(const DissimilarityMatrix& dis);

/// Keeps every tree edge plus each other pair with
/// mlink_ij + gamma (d_i + d_j) > z_ij. Throws ConfigError on gamma < 0.
RmstNetwork relax(const DissimilarityMatrix& dis, std::span<const UndirectedEdge> tree,
                  const Eigen::MatrixXd& mlink, std::span<const double> scale, double gamma,
                  bool weighted);

RmstNetwork buildRmst(const SimilarityMatrix& sim, double gamma, bool weighted);

bool isConnected(std::size_t n, std::span<const UndirectedEdge> edges);

} // namespace rolecomm
