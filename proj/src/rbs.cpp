#include "rolecomm/rbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rolecomm/error.hpp"

namespace rolecomm {

void RbsConfig::validate(std::size_t n) const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(lambdaTolerance > 0.0))
        throw ConfigError("lambda tolerance must be positive");
    if (!(truncationTolerance > 0.0))
        throw ConfigError("truncation tolerance must be positive");
    if (n < 2)
        throw ConfigError("path features need at least 2 nodes");
    if (kMax) {
        if (*kMax < 1)
            throw ConfigError("k_max must be at least 1");
        if (*kMax >= n)
            throw ConfigError("k_max = " + std::to_string(*kMax) + " must be smaller than N = "
                              + std::to_string(n));
    }
}

namespace {

// Iterative Tarjan; returns the component id of every node.
std::vector<std::size_t> stronglyConnectedComponents(const DirectedGraph& g, std::size_t& count) {
    constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = g.size();
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<bool> onStack(n, false);
    std::vector<NodeId> stack;
    std::vector<std::pair<NodeId, std::size_t>> callStack;
    std::size_t nextIndex = 0;
    count = 0;

    for (NodeId root = 0; root < n; ++root) {
        if (index[root] != kUnvisited)
            continue;
        callStack.emplace_back(root, 0);
        index[root] = low[root] = nextIndex++;
        stack.push_back(root);
        onStack[root] = true;
        while (!callStack.empty()) {
            auto& [u, pos] = callStack.back();
            auto nbrs = g.outNeighbors(u);
            if (pos < nbrs.size()) {
                NodeId v = nbrs[pos++];
                if (index[v] == kUnvisited) {
                    index[v] = low[v] = nextIndex++;
                    stack.push_back(v);
                    onStack[v] = true;
                    callStack.emplace_back(v, 0);
                } else if (onStack[v]) {
                    low[u] = std::min(low[u], index[v]);
                }
                continue;
            }
            NodeId done = u;
            callStack.pop_back();
            if (!callStack.empty()) {
                NodeId parent = callStack.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                NodeId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

struct ComponentRoot {
    double rho = 0.0;
    std::size_t iterations = 0;
};

// Perron root of an irreducible block via power iteration on (A_c + I).
ComponentRoot componentPerronRoot(const DirectedGraph& g, const std::vector<NodeId>& members,
                                  const std::vector<std::size_t>& comp, std::size_t id,
                                  const std::vector<std::size_t>& local, double tol,
                                  std::size_t maxIterations) {
    const std::size_t m = members.size();
    std::vector<double> v(m, 1.0), w(m, 0.0);
    double lower = 0.0, upper = 0.0;
    for (std::size_t it = 1; it <= maxIterations; ++it) {
        for (std::size_t a = 0; a < m; ++a) {
            double s = v[a];
            for (NodeId t : g.outNeighbors(members[a])) {
                if (comp[t] == id)
                    s += v[local[t]];
            }
            w[a] = s;
        }
        lower = std::numeric_limits<double>::infinity();
        upper = 0.0;
        double scale = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            double ratio = w[a] / v[a];
            lower = std::min(lower, ratio);
            upper = std::max(upper, ratio);
            scale = std::max(scale, w[a]);
        }
        double estimate = 0.5 * (lower + upper);
        if (upper - lower < tol * std::max(1.0, estimate))
            return {estimate - 1.0, it};
        for (std::size_t a = 0; a < m; ++a)
            v[a] = w[a] / scale;
    }
    throw NumericalError("power iteration did not converge after " + std::to_string(maxIterations)
                         + " iterations; last spectral radius estimate "
                         + std::to_string(0.5 * (lower + upper) - 1.0) + " (bracket width "
                         + std::to_string(upper - lower) + ")");
}

} // namespace

SpectralInfo spectralRadius(const DirectedGraph& g, double alpha, double tol) {
    if (!(tol > 0.0))
        throw ConfigError("spectral tolerance must be positive");
    const std::size_t n = g.size();
    std::size_t count = 0;
    auto comp = stronglyConnectedComponents(g, count);

    std::vector<std::vector<NodeId>> members(count);
    std::vector<std::size_t> local(n);
    for (NodeId u = 0; u < n; ++u) {
        local[u] = members[comp[u]].size();
        members[comp[u]].push_back(u);
    }

    SpectralInfo info;
    const std::size_t maxIterations = 10 * n + 1000;
    for (std::size_t c = 0; c < count; ++c) {
        const auto& nodes = members[c];
        if (nodes.size() == 1) {
            // A single node carries a cycle only through its self-loop.
            if (g.hasEdge(nodes[0], nodes[0]))
                info.lambda1 = std::max(info.lambda1, 1.0);
            continue;
        }
        auto root = componentPerronRoot(g, nodes, comp, c, local, tol, maxIterations);
        info.iterations += root.iterations;
        info.lambda1 = std::max(info.lambda1, root.rho);
    }
    info.beta = info.lambda1 > tol ? alpha / info.lambda1 : alpha;
    return info;
}

FeatureMatrix featureMatrix(const DirectedGraph& g, const RbsConfig& cfg, const SpectralInfo& spectral) {
    const std::size_t n = g.size();
    cfg.validate(n);
    const double beta = spectral.beta;
    const std::size_t limit = cfg.kMax.value_or(n - 1);

    std::vector<Eigen::VectorXd> inCols, outCols;
    Eigen::VectorXd vIn = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    Eigen::VectorXd vOut = vIn;
    Eigen::VectorXd next(static_cast<Eigen::Index>(n));

    for (std::size_t k = 1; k <= limit; ++k) {
        // in: (beta A^T v)_i sums over predecessors of i.
        for (NodeId i = 0; i < n; ++i) {
            double s = 0.0;
            for (NodeId j : g.inNeighbors(i))
                s += vIn[static_cast<Eigen::Index>(j)];
            next[static_cast<Eigen::Index>(i)] = beta * s;
        }
        vIn.swap(next);
        for (NodeId i = 0; i < n; ++i) {
            double s = 0.0;
            for (NodeId j : g.outNeighbors(i))
                s += vOut[static_cast<Eigen::Index>(j)];
            next[static_cast<Eigen::Index>(i)] = beta * s;
        }
        vOut.swap(next);
        inCols.push_back(vIn);
        outCols.push_back(vOut);

        if (!cfg.kMax && vIn.lpNorm<Eigen::Infinity>() < cfg.truncationTolerance
            && vOut.lpNorm<Eigen::Infinity>() < cfg.truncationTolerance)
            break;
    }

    FeatureMatrix fm;
    fm.kMax = inCols.size();
    fm.beta = beta;
    const auto k = static_cast<Eigen::Index>(fm.kMax);
    fm.x.resize(static_cast<Eigen::Index>(n), 2 * k);
    for (Eigen::Index c = 0; c < k; ++c) {
        fm.x.col(c) = inCols[static_cast<std::size_t>(c)];
        fm.x.col(k + c) = outCols[static_cast<std::size_t>(c)];
    }
    return fm;
}

SimilarityMatrix rbsMatrix(const FeatureMatrix& features) {
    // Node profiles as contiguous columns.
    const Eigen::MatrixXd profiles = features.x.transpose();
    const Eigen::Index n = profiles.cols();
    Eigen::VectorXd norms(n);
    for (Eigen::Index i = 0; i < n; ++i)
        norms[i] = profiles.col(i).norm();

    constexpr double kZeroNorm = std::numeric_limits<double>::min();
    SimilarityMatrix sim;
    sim.y.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sim.y(i, i) = 1.0;
        if (norms[i] <= kZeroNorm)
            continue;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (norms[j] <= kZeroNorm)
                continue;
            double cosine = profiles.col(i).dot(profiles.col(j)) / (norms[i] * norms[j]);
            cosine = std::clamp(cosine, 0.0, 1.0);
            sim.y(i, j) = cosine;
            sim.y(j, i) = cosine;
        }
    }
    return sim;
}

RbsResult computeRbs(const DirectedGraph& g, const RbsConfig& cfg) {
    cfg.validate(g.size());
    RbsResult result;
    result.spectral = spectralRadius(g, cfg.alpha, cfg.lambdaTolerance);
    result.features = featureMatrix(g, cfg, result.spectral);
    result.similarity = rbsMatrix(result.features);
    return result;
}

} // namespace rolecomm
