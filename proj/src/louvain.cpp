#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rolecomm/stability.hpp"

namespace rolecomm {

namespace {

constexpr std::size_t kMaxSweeps = 1000;
constexpr std::size_t kMaxLevels = 1000;
constexpr double kRelativeGainTolerance = 1e-12;

// Fisher-Yates with a plain modulo draw: portable across standard
// libraries, unlike std::shuffle.
std::vector<std::size_t> shuffledOrder(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

// Local moving on one level. comm starts as singletons; returns whether any
// node changed community.
bool moveNodes(const Eigen::MatrixXd& m, std::vector<std::size_t>& comm, double tolerance,
               std::mt19937_64& rng) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), std::size_t{0});
    std::vector<std::size_t> sizes(n, 1);
    std::vector<std::size_t> freeLabels;
    std::vector<double> links(n, 0.0);
    std::vector<bool> touched(n, false);
    std::vector<std::size_t> candidates;
    candidates.reserve(n);

    const auto order = shuffledOrder(n, rng);
    bool anyMove = false;
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool moved = false;
        for (std::size_t i : order) {
            const auto column = m.col(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                std::size_t c = comm[j];
                if (!touched[c]) {
                    touched[c] = true;
                    links[c] = 0.0;
                    candidates.push_back(c);
                }
                links[c] += column[static_cast<Eigen::Index>(j)];
            }

            const std::size_t current = comm[i];
            std::size_t best = current;
            double bestLinks = touched[current] ? links[current] : 0.0;
            for (std::size_t c : candidates) {
                if (c != current && links[c] > bestLinks + tolerance) {
                    best = c;
                    bestLinks = links[c];
                }
            }
            if (sizes[current] > 1 && 0.0 > bestLinks + tolerance) {
                best = freeLabels.back();
                freeLabels.pop_back();
            }
            for (std::size_t c : candidates)
                touched[c] = false;
            candidates.clear();

            if (best != current) {
                if (--sizes[current] == 0)
                    freeLabels.push_back(current);
                ++sizes[best];
                comm[i] = best;
                moved = true;
            }
        }
        if (!moved)
            break;
        anyMove = true;
    }
    return anyMove;
}

Eigen::MatrixXd aggregate(const Eigen::MatrixXd& m, const std::vector<std::size_t>& comm,
                          std::size_t count) {
    const auto c = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c, c);
    const auto n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto cj = static_cast<Eigen::Index>(comm[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < n; ++i)
            out(static_cast<Eigen::Index>(comm[static_cast<std::size_t>(i)]), cj) += m(i, j);
    }
    return out;
}

} // namespace

LouvainResult louvainOptimize(const Eigen::MatrixXd& b, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(b.rows());
    LouvainResult result;
    if (n == 0)
        return result;

    const double scale = b.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        // Every partition scores zero; take the coarsest.
        result.partition = Partition::allInOne(n);
        return result;
    }
    const double tolerance = kRelativeGainTolerance * scale;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), std::size_t{0});

    Eigen::MatrixXd level = b;
    std::vector<std::size_t> comm;
    for (std::size_t depth = 0; depth < kMaxLevels; ++depth) {
        if (!moveNodes(level, comm, tolerance, rng))
            break;
        Partition compact = Partition::canonical(comm);
        for (auto& v : membership)
            v = compact.assignment[v];
        if (compact.count == 1)
            break;
        level = aggregate(level, compact.assignment, compact.count);
    }

    result.partition = Partition::canonical(membership);
    result.quality = partitionQuality(b, result.partition);
    return result;
}

} // namespace rolecomm
