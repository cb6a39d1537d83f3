#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "rolecomm/error.hpp"
#include "rolecomm/stability.hpp"

namespace rolecomm {

Partition Partition::canonical(std::span<const std::size_t> labels) {
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    std::size_t maxLabel = 0;
    for (auto l : labels)
        maxLabel = std::max(maxLabel, l);
    std::vector<std::size_t> relabel(labels.empty() ? 0 : maxLabel + 1, kUnset);
    Partition p;
    p.assignment.reserve(labels.size());
    for (auto l : labels) {
        if (relabel[l] == kUnset)
            relabel[l] = p.count++;
        p.assignment.push_back(relabel[l]);
    }
    return p;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        p.assignment[i] = i;
    p.count = n;
    return p;
}

Partition Partition::allInOne(std::size_t n) {
    Partition p;
    p.assignment.assign(n, 0);
    p.count = n > 0 ? 1 : 0;
    return p;
}

double partitionQuality(const Eigen::MatrixXd& b, const Partition& p) {
    const std::size_t n = p.size();
    if (static_cast<std::size_t>(b.rows()) != n || static_cast<std::size_t>(b.cols()) != n)
        throw ConfigError("partition size does not match the quality matrix");
    std::vector<std::vector<Eigen::Index>> members(p.count);
    for (std::size_t i = 0; i < n; ++i)
        members[p.assignment[i]].push_back(static_cast<Eigen::Index>(i));
    double total = 0.0;
    for (const auto& group : members) {
        for (auto j : group) {
            for (auto i : group)
                total += b(i, j);
        }
    }
    return total;
}

namespace {

double entropy(const std::vector<std::size_t>& counts, double n) {
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0)
            continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

std::vector<std::size_t> communitySizes(const Partition& p) {
    std::vector<std::size_t> sizes(p.count, 0);
    for (auto c : p.assignment)
        ++sizes[c];
    return sizes;
}

} // namespace

double variationOfInformation(const Partition& a, const Partition& b) {
    const std::size_t n = a.size();
    if (b.size() != n)
        throw ConfigError("partitions cover different node counts");
    if (n < 2)
        throw ConfigError("variation of information needs at least 2 nodes");

    // Fixed argument order keeps the result exactly symmetric.
    const Partition& p = a.assignment <= b.assignment ? a : b;
    const Partition& q = a.assignment <= b.assignment ? b : a;
    std::vector<std::pair<std::size_t, std::size_t>> cells(n);
    for (std::size_t i = 0; i < n; ++i)
        cells[i] = {p.assignment[i], q.assignment[i]};
    std::sort(cells.begin(), cells.end());
    std::vector<std::size_t> joint;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && cells[j] == cells[i])
            ++j;
        joint.push_back(j - i);
        i = j;
    }

    const double nn = static_cast<double>(n);
    const double vi = (2.0 * entropy(joint, nn) - entropy(communitySizes(p), nn)
                       - entropy(communitySizes(q), nn))
                      / std::log(nn);
    return std::clamp(vi, 0.0, 1.0);
}

double meanPairwiseVi(std::span<const Partition> partitions) {
    if (partitions.size() < 2)
        throw ConfigError("mean pairwise VI needs at least 2 partitions");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        for (std::size_t j = i + 1; j < partitions.size(); ++j) {
            sum += partitions[i] == partitions[j] ? 0.0
                                                  : variationOfInformation(partitions[i], partitions[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

} // namespace rolecomm
