#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "rolecomm/graph_io.hpp"

namespace rolecomm {

struct RbsConfig {
    static constexpr double kDefaultAlpha = 0.95;

    double alpha = kDefaultAlpha;
    /// Number of path lengths; std::nullopt selects automatic truncation.
    std::optional<std::size_t> kMax;
    double lambdaTolerance = 1e-10;
    double truncationTolerance = 1e-10;

    /// Throws ConfigError unless 0 < alpha < 1, tolerances are positive and
    /// an explicit kMax satisfies 1 <= kMax < n.
    void validate(std::size_t n) const;
};

struct SpectralInfo {
    double lambda1 = 0.0;
    double beta = 0.0;
    std::size_t iterations = 0;
};

/**
 * Perron root of the adjacency matrix and the path scaling beta.
 *
 * The spectral radius of a nonnegative matrix is the maximum over its
 * strongly connected components, so each nontrivial component is handled
 * separately by power iteration on (A_c + I) from the all-ones vector.
 * The shift makes every irreducible block primitive, which removes the
 * oscillation of plain power iteration on periodic (e.g. cyclic or
 * bipartite) components. Convergence is declared once the Collatz-Wielandt
 * bracket min_i (Mv)_i/v_i <= rho <= max_i (Mv)_i/v_i is narrower than
 * tol * max(1, rho). Acyclic graphs have lambda1 = 0 exactly and get
 * beta = alpha.
 *
 * Throws NumericalError if a component fails to converge within
 * 10 * n + 1000 iterations.
 */
SpectralInfo spectralRadius(const DirectedGraph& g, double alpha, double tol);

/**
 * N x 2K matrix of scaled walk counts. Column k-1 (k = 1..K) holds
 * (beta A^T)^k 1, the walks of length k ending at each node; column K+k-1
 * holds (beta A)^k 1, the walks of length k starting at each node.
 */
struct FeatureMatrix {
    Eigen::MatrixXd x;
    std::size_t kMax = 0;
    double beta = 0.0;

    auto inBlock() const { return x.leftCols(static_cast<Eigen::Index>(kMax)); }
    auto outBlock() const { return x.rightCols(static_cast<Eigen::Index>(kMax)); }
};

FeatureMatrix featureMatrix(const DirectedGraph& g, const RbsConfig& cfg, const SpectralInfo& spectral);

struct SimilarityMatrix {
    Eigen::MatrixXd y;
};

/// Pairwise cosine similarity of feature rows. Zero rows are similar only
/// to themselves (y_ii = 1, y_ij = 0).
SimilarityMatrix rbsMatrix(const FeatureMatrix& features);

struct RbsResult {
    SpectralInfo spectral;
    FeatureMatrix features;
    SimilarityMatrix similarity;
};

RbsResult computeRbs(const DirectedGraph& g, const RbsConfig& cfg);

} // namespace rolecomm
