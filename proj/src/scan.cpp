#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rolecomm/error.hpp"
#include "rolecomm/stability.hpp"

namespace rolecomm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Runs body(k) for k in [0, count) on up to `threads` workers.
template <typename Body>
void parallelFor(std::size_t count, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k)
            body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(failureMutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure)
        std::rethrow_exception(failure);
}

bool betterRun(const LouvainResult& a, const LouvainResult& b) {
    if (a.quality != b.quality)
        return a.quality > b.quality;
    if (a.partition.count != b.partition.count)
        return a.partition.count < b.partition.count;
    return a.partition.assignment < b.partition.assignment;
}

} // namespace

std::uint64_t runSeed(std::uint64_t seed, std::size_t timeIndex, std::size_t runIndex) {
    const std::uint64_t key = (static_cast<std::uint64_t>(timeIndex) << 32)
                              + static_cast<std::uint64_t>(runIndex);
    return seed ^ splitmix64(key);
}

std::vector<double> logGrid(double tMin, double tMax, std::size_t count) {
    if (!(tMin > 0.0) || !(tMax > tMin))
        throw ConfigError("Markov time grid needs 0 < t_min < t_max");
    if (count < 2)
        throw ConfigError("Markov time grid needs at least 2 points");
    std::vector<double> grid(count);
    const double lo = std::log10(tMin), hi = std::log10(tMax);
    for (std::size_t k = 0; k < count; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(count - 1);
        grid[k] = std::pow(10.0, lo + frac * (hi - lo));
    }
    grid.front() = tMin;
    grid.back() = tMax;
    return grid;
}

std::vector<ScanPoint> timeScan(const MarkovProcess& mp, std::span<const double> times,
                                const ScanOptions& options) {
    if (options.runs < 2)
        throw ConfigError("a scan needs at least 2 Louvain runs per Markov time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0))
            throw ConfigError("Markov times must be nonnegative");
        if (k > 0 && times[k] < times[k - 1])
            throw ConfigError("Markov times must be sorted ascending");
    }
    std::size_t threads = options.threads;
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<ScanPoint> scan;
    scan.reserve(times.size());
    std::vector<LouvainResult> runs(options.runs);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const Eigen::MatrixXd b = mp.autocovariance(times[ti]);
        parallelFor(options.runs, threads, [&](std::size_t r) {
            runs[r] = louvainOptimize(b, runSeed(options.seed, ti, r));
        });

        ScanPoint point;
        point.t = times[ti];
        std::size_t best = 0;
        std::vector<Partition> ensemble;
        ensemble.reserve(runs.size());
        for (std::size_t r = 0; r < runs.size(); ++r) {
            point.runStabilities.push_back(runs[r].quality);
            ensemble.push_back(runs[r].partition);
            if (betterRun(runs[r], runs[best]))
                best = r;
        }
        point.bestPartition = runs[best].partition;
        point.bestStability = runs[best].quality;
        point.communities = point.bestPartition.count;
        point.meanVi = mp.size() >= 2 ? meanPairwiseVi(ensemble) : 0.0;
        if (!scan.empty() && mp.size() >= 2)
            point.viToPrevious = variationOfInformation(scan.back().bestPartition, point.bestPartition);
        scan.push_back(std::move(point));
    }
    return scan;
}

std::vector<RobustScale> selectRobust(std::span<const ScanPoint> scan, double viThreshold,
                                      std::size_t minPlateau) {
    std::vector<RobustScale> candidates;
    const std::size_t n = scan.size();

    auto isDip = [&](std::size_t i) {
        if (!(scan[i].meanVi < viThreshold))
            return false;
        if (i > 0 && scan[i - 1].meanVi < scan[i].meanVi)
            return false;
        if (i + 1 < n && scan[i + 1].meanVi < scan[i].meanVi)
            return false;
        return true;
    };

    for (std::size_t begin = 0; begin < n;) {
        std::size_t end = begin + 1;
        while (end < n && scan[end].communities == scan[begin].communities)
            ++end;

        bool dip = false;
        std::size_t rep = begin;
        for (std::size_t i = begin; i < end; ++i) {
            dip = dip || isDip(i);
            if (scan[i].meanVi < scan[rep].meanVi)
                rep = i;
        }
        if (end - begin >= minPlateau || dip) {
            RobustScale scale;
            scale.timeIndex = rep;
            scale.t = scan[rep].t;
            scale.partition = scan[rep].bestPartition;
            scale.communities = scan[rep].communities;
            scale.stability = scan[rep].bestStability;
            scale.meanVi = scan[rep].meanVi;
            scale.plateauBegin = begin;
            scale.plateauEnd = end;
            scale.viDip = dip;
            candidates.push_back(std::move(scale));
        }
        begin = end;
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const RobustScale& a, const RobustScale& b) {
        if (a.plateauLength() != b.plateauLength())
            return a.plateauLength() > b.plateauLength();
        return a.meanVi < b.meanVi;
    });
    return candidates;
}

} // namespace rolecomm
