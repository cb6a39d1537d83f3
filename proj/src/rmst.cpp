#include "rolecomm/rmst.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "rolecomm/error.hpp"

namespace rolecomm {

DissimilarityMatrix dissimilarity(const SimilarityMatrix& sim) {
    DissimilarityMatrix dis;
    dis.z = (1.0 - sim.y.array()).matrix();
    dis.z.diagonal().setZero();
    return dis;
}

namespace {

UndirectedEdge ordered(std::size_t a, std::size_t b) {
    return a < b ? UndirectedEdge{a, b} : UndirectedEdge{b, a};
}

// Strict total order on weighted edges: weight first, then endpoints.
bool lighter(double wa, UndirectedEdge a, double wb, UndirectedEdge b) {
    return std::tie(wa, a.u, a.v) < std::tie(wb, b.u, b.v);
}

class MemberUnionFind {
public:
    explicit MemberUnionFind(std::size_t n) : parent_(n), members_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i)
            members_[i] = {i};
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    const std::vector<std::size_t>& members(std::size_t root) const { return members_[root]; }

    // Smaller member list is appended to the larger one.
    void unite(std::size_t ra, std::size_t rb) {
        if (members_[ra].size() < members_[rb].size())
            std::swap(ra, rb);
        parent_[rb] = ra;
        members_[ra].insert(members_[ra].end(), members_[rb].begin(), members_[rb].end());
        members_[rb].clear();
        members_[rb].shrink_to_fit();
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> members_;
};

} // namespace

std::vector<UndirectedEdge> minimumSpanningTree(const DissimilarityMatrix& dis) {
    const std::size_t n = dis.size();
    if (n < 2)
        throw ConfigError("a spanning tree needs at least 2 nodes");
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<bool> inTree(n, false);
    std::vector<double> key(n, kInf);
    std::vector<std::size_t> via(n, kNone);
    std::vector<UndirectedEdge> tree;
    tree.reserve(n - 1);

    auto keyEdge = [&](std::size_t v) {
        return via[v] == kNone ? UndirectedEdge{kNone, kNone} : ordered(v, via[v]);
    };

    std::size_t current = 0;
    inTree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        for (std::size_t v = 0; v < n; ++v) {
            if (inTree[v])
                continue;
            double w = dis.z(static_cast<Eigen::Index>(current), static_cast<Eigen::Index>(v));
            if (via[v] == kNone || lighter(w, ordered(current, v), key[v], keyEdge(v))) {
                key[v] = w;
                via[v] = current;
            }
        }
        std::size_t best = kNone;
        for (std::size_t v = 0; v < n; ++v) {
            if (inTree[v])
                continue;
            if (best == kNone || lighter(key[v], keyEdge(v), key[best], keyEdge(best)))
                best = v;
        }
        inTree[best] = true;
        tree.push_back(keyEdge(best));
        current = best;
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

Eigen::MatrixXd mlinkAllPairs(std::span<const UndirectedEdge> tree, const DissimilarityMatrix& dis) {
    const std::size_t n = dis.size();
    if (n < 1 || tree.size() + 1 != n)
        throw ConfigError("a spanning tree on " + std::to_string(n) + " nodes needs "
                          + std::to_string(n == 0 ? 0 : n - 1) + " edges, got "
                          + std::to_string(tree.size()));

    auto weight = [&](const UndirectedEdge& e) {
        return dis.z(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v));
    };
    std::vector<UndirectedEdge> order;
    order.reserve(tree.size());
    for (const auto& e : tree) {
        if (e.u >= n || e.v >= n || e.u == e.v)
            throw ConfigError("invalid tree edge (" + std::to_string(e.u) + ", "
                              + std::to_string(e.v) + ")");
        order.push_back(ordered(e.u, e.v));
    }
    std::sort(order.begin(), order.end(), [&](const UndirectedEdge& a, const UndirectedEdge& b) {
        return lighter(weight(a), a, weight(b), b);
    });

    Eigen::MatrixXd mlink = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    MemberUnionFind uf(n);
    for (const auto& e : order) {
        std::size_t ra = uf.find(e.u), rb = uf.find(e.v);
        if (ra == rb)
            throw ConfigError("tree edges contain a cycle through (" + std::to_string(e.u) + ", "
                              + std::to_string(e.v) + ")");
        const double w = weight(e);
        for (std::size_t a : uf.members(ra)) {
            for (std::size_t b : uf.members(rb)) {
                mlink(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = w;
                mlink(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = w;
            }
        }
        uf.unite(ra, rb);
    }
    return mlink;
}

std::vector<double> localScale(const DissimilarityMatrix& dis) {
    const auto n = static_cast<Eigen::Index>(dis.size());
    if (n < 2)
        throw ConfigError("local scale needs at least 2 nodes");
    std::vector<double> d(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k != i)
                d[static_cast<std::size_t>(i)] = std::min(d[static_cast<std::size_t>(i)], dis.z(i, k));
        }
    }
    return d;
}

RmstNetwork relax(const DissimilarityMatrix& dis, std::span<const UndirectedEdge> tree,
                  const Eigen::MatrixXd& mlink, std::span<const double> scale, double gamma,
                  bool weighted) {
    if (!(gamma >= 0.0))
        throw ConfigError("gamma must be nonnegative, got " + std::to_string(gamma));
    const std::size_t n = dis.size();
    if (static_cast<std::size_t>(mlink.rows()) != n || scale.size() != n)
        throw ConfigError("mlink and local scale must match the dissimilarity size");

    RmstNetwork net;
    net.n = n;
    net.gamma = gamma;
    for (const auto& e : tree)
        net.mstEdges.push_back(ordered(e.u, e.v));
    std::sort(net.mstEdges.begin(), net.mstEdges.end());

    std::vector<bool> isTree(n * n, false);
    for (const auto& e : net.mstEdges)
        isTree[e.u * n + e.v] = true;

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (isTree[i * n + j] || mlink(ii, jj) + gamma * (scale[i] + scale[j]) > dis.z(ii, jj))
                net.edges.push_back({i, j});
        }
    }
    if (weighted) {
        std::vector<double> w;
        w.reserve(net.edges.size());
        for (const auto& e : net.edges)
            w.push_back(1.0 - dis.z(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)));
        net.weights = std::move(w);
    }
    return net;
}

RmstNetwork buildRmst(const SimilarityMatrix& sim, double gamma, bool weighted) {
    auto dis = dissimilarity(sim);
    auto tree = minimumSpanningTree(dis);
    auto mlink = mlinkAllPairs(tree, dis);
    auto scale = localScale(dis);
    return relax(dis, tree, mlink, scale, gamma, weighted);
}

bool isConnected(std::size_t n, std::span<const UndirectedEdge> edges) {
    if (n == 0)
        return false;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = n;
    for (const auto& e : edges) {
        auto a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

} // namespace rolecomm
