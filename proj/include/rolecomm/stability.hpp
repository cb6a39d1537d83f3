#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rolecomm/rmst.hpp"

namespace rolecomm {

// ---------------------------------------------------------------------------
// Continuous-time random walk on an undirected network
// ---------------------------------------------------------------------------

/**
 * Random walk with generator L = I - D^{-1} E on a connected undirected
 * network, stored through the symmetric normalised Laplacian
 * L_sym = I - D^{-1/2} E D^{-1/2} = V diag(lambda) V^T, which is similar to L.
 * The eigendecomposition is computed once and reused for every Markov time.
 */
class MarkovProcess {
public:
    /// Throws NumericalError on a zero-strength node or a disconnected
    /// network, ConfigError on a non-square, asymmetric or negative matrix.
    static MarkovProcess fromAdjacency(const Eigen::MatrixXd& adjacency);

    std::size_t size() const { return static_cast<std::size_t>(degree_.size()); }
    const Eigen::VectorXd& degree() const { return degree_; }
    const Eigen::VectorXd& stationary() const { return pi_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

    /// P(t) = exp(-t L) = D^{-1/2} V exp(-t diag(lambda)) V^T D^{1/2}.
    /// Throws ConfigError on t < 0.
    Eigen::MatrixXd transition(double t) const;

    /// Clustered autocovariance matrix B(t) = sym(Pi P(t)) - pi pi^T.
    /// Pi P(t) = (1/2m) D^{1/2} V exp(-t diag(lambda)) V^T D^{1/2}.
    Eigen::MatrixXd autocovariance(double t) const;

private:
    Eigen::VectorXd degree_;
    Eigen::VectorXd pi_;
    Eigen::VectorXd sqrtDegree_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

/// Uses edge weights when weighted is set (ConfigError if the network
/// carries none), unit weights otherwise.
MarkovProcess markovProcess(const RmstNetwork& net, bool weighted);

Eigen::MatrixXd transitionMatrix(const MarkovProcess& mp, double t);

/// max_i |sum_j P_ij - 1|, a diagnostic only.
double rowStochasticError(const Eigen::MatrixXd& p);

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// Hard partition; labels are 0..count-1, each used at least once.
struct Partition {
    std::vector<std::size_t> assignment;
    std::size_t count = 0;

    std::size_t size() const { return assignment.size(); }

    /// Relabels communities in order of first appearance. Any labels are
    /// accepted on input.
    static Partition canonical(std::span<const std::size_t> labels);
    static Partition singletons(std::size_t n);
    static Partition allInOne(std::size_t n);

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// trace(H^T B H) = sum of b_ij over pairs in the same community.
double partitionQuality(const Eigen::MatrixXd& b, const Partition& p);

/// r(t, H) evaluated on B(t).
double stabilityScore(const MarkovProcess& mp, double t, const Partition& p);

/// Normalised variation of information (natural log, divided by log N).
/// Throws ConfigError when N < 2 or the partitions differ in size.
double variationOfInformation(const Partition& a, const Partition& b);

/// Mean VI over all unordered pairs; ConfigError with fewer than 2.
double meanPairwiseVi(std::span<const Partition> partitions);

// ---------------------------------------------------------------------------
// Louvain on a dense quality matrix
// ---------------------------------------------------------------------------

struct LouvainResult {
    Partition partition;
    double quality = 0.0;
};

/**
 * Two-phase Louvain maximising trace(H^T B H) for a dense symmetric B.
 *
 * Phase one visits nodes in a seeded random order and moves each to the
 * community with the largest gain 2 * sum_{j in c, j != i} b_ij relative to
 * isolation (an empty community is always a candidate, since B may have
 * negative entries). Phase two sums B over community blocks to form the
 * next level. Stops when a level makes no move. Deterministic given seed.
 */
LouvainResult louvainOptimize(const Eigen::MatrixXd& b, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Markov-time scan and robust scale selection
// ---------------------------------------------------------------------------

struct ScanOptions {
    std::size_t runs = 100;
    std::uint64_t seed = 0;
    /// 0 selects std::thread::hardware_concurrency().
    std::size_t threads = 1;
};

struct ScanPoint {
    double t = 0.0;
    Partition bestPartition;
    double bestStability = 0.0;
    double meanVi = 0.0;
    std::size_t communities = 0;
    std::vector<double> runStabilities;
    /// VI between this best partition and the previous time's; 0 at the
    /// first grid point.
    double viToPrevious = 0.0;
};

/// Seed for one Louvain run: seed XOR splitmix64(timeIndex * 2^32 + runIndex).
std::uint64_t runSeed(std::uint64_t seed, std::size_t timeIndex, std::size_t runIndex);

/// Log-spaced grid of count points over [tMin, tMax].
std::vector<double> logGrid(double tMin, double tMax, std::size_t count);

/**
 * Optimises stability at every Markov time with `runs` independent Louvain
 * runs. Runs at one time execute on a worker pool; results are reduced in
 * run order, so output does not depend on the thread count. The best
 * partition maximises quality, ties going to fewer communities and then
 * the lexicographically smaller canonical assignment.
 */
std::vector<ScanPoint> timeScan(const MarkovProcess& mp, std::span<const double> times,
                                const ScanOptions& options);

struct RobustScale {
    std::size_t timeIndex = 0;
    double t = 0.0;
    Partition partition;
    std::size_t communities = 0;
    double stability = 0.0;
    double meanVi = 0.0;
    /// Grid range [plateauBegin, plateauEnd) over which the community
    /// count stays constant.
    std::size_t plateauBegin = 0;
    std::size_t plateauEnd = 0;
    bool viDip = false;

    std::size_t plateauLength() const { return plateauEnd - plateauBegin; }
};

/**
 * Candidate scales from a scan. A candidate is a maximal run of constant
 * community count that is at least minPlateau grid points long, or that
 * contains a local minimum of mean VI below viThreshold. The representative
 * point of a candidate is its lowest-VI grid point (earliest on ties).
 * Candidates are ranked by plateau length, then by lower mean VI.
 */
std::vector<RobustScale> selectRobust(std::span<const ScanPoint> scan, double viThreshold,
                                      std::size_t minPlateau);

} // namespace rolecomm
