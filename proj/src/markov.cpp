#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rolecomm/error.hpp"
#include "rolecomm/stability.hpp"

namespace rolecomm {

MarkovProcess MarkovProcess::fromAdjacency(const Eigen::MatrixXd& adjacency) {
    const Eigen::Index n = adjacency.rows();
    if (n < 1 || adjacency.cols() != n)
        throw ConfigError("adjacency matrix must be square and nonempty");
    if ((adjacency.array() < 0.0).any())
        throw ConfigError("adjacency weights must be nonnegative");
    const double scale = std::max(1.0, adjacency.cwiseAbs().maxCoeff());
    if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ConfigError("adjacency matrix must be symmetric");

    MarkovProcess mp;
    mp.degree_ = adjacency.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(mp.degree_[i] > 0.0))
            throw NumericalError("node " + std::to_string(i) + " has zero degree");
    }

    // Connectivity over positive-weight links.
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> frontier{0};
    seen[0] = true;
    Eigen::Index reached = 1;
    while (!frontier.empty()) {
        Eigen::Index u = frontier.back();
        frontier.pop_back();
        for (Eigen::Index v = 0; v < n; ++v) {
            if (!seen[static_cast<std::size_t>(v)] && adjacency(u, v) > 0.0) {
                seen[static_cast<std::size_t>(v)] = true;
                ++reached;
                frontier.push_back(v);
            }
        }
    }
    if (reached != n)
        throw NumericalError("similarity network is disconnected (" + std::to_string(reached)
                             + " of " + std::to_string(n) + " nodes reachable)");

    const double total = mp.degree_.sum();
    mp.pi_ = mp.degree_ / total;
    mp.sqrtDegree_ = mp.degree_.array().sqrt();
    const Eigen::VectorXd invSqrt = mp.sqrtDegree_.cwiseInverse();

    Eigen::MatrixXd lsym = -(invSqrt.asDiagonal() * adjacency * invSqrt.asDiagonal());
    lsym.diagonal().array() += 1.0;
    lsym = 0.5 * (lsym + lsym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lsym);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition of the normalised Laplacian failed");
    // The spectrum lies in [0, 2]; clip rounding noise at the ends.
    mp.eigenvalues_ = solver.eigenvalues().cwiseMax(0.0).cwiseMin(2.0);
    mp.eigenvectors_ = solver.eigenvectors();
    return mp;
}

Eigen::MatrixXd MarkovProcess::transition(double t) const {
    if (!(t >= 0.0))
        throw ConfigError("Markov time must be nonnegative");
    const Eigen::VectorXd decay = (-t * eigenvalues_.array()).exp();
    const Eigen::MatrixXd core = (eigenvectors_ * decay.asDiagonal()) * eigenvectors_.transpose();
    return sqrtDegree_.cwiseInverse().asDiagonal() * core * sqrtDegree_.asDiagonal();
}

Eigen::MatrixXd MarkovProcess::autocovariance(double t) const {
    if (!(t >= 0.0))
        throw ConfigError("Markov time must be nonnegative");
    // The stationary mode (lambda = 0, eigenvector D^{1/2} 1 / sqrt(2m))
    // contributes exactly pi pi^T to Pi P(t), so it is dropped instead of
    // subtracted. This keeps B accurate relative to its own size when the
    // remaining modes have decayed to rounding level at large t. Modes whose
    // decay factor is below machine epsilon are cut to zero rather than
    // carried as subnormals.
    const Eigen::Index n = eigenvalues_.size();
    const Eigen::Index m = n - 1;
    const double eps = std::numeric_limits<double>::epsilon();
    const Eigen::VectorXd decay =
        (-t * eigenvalues_.tail(m).array()).exp().unaryExpr([eps](double v) { return v < eps ? 0.0 : v; });
    const Eigen::MatrixXd scaled = sqrtDegree_.asDiagonal() * eigenvectors_.rightCols(m);
    Eigen::MatrixXd flow = (scaled * decay.asDiagonal()) * scaled.transpose();
    flow /= degree_.sum();
    return 0.5 * (flow + flow.transpose());
}

MarkovProcess markovProcess(const RmstNetwork& net, bool weighted) {
    if (weighted && !net.weights)
        throw ConfigError("weighted Markov process requested but the network has no weights");
    const auto n = static_cast<Eigen::Index>(net.n);
    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto& e = net.edges[k];
        if (e.u == e.v)
            throw ConfigError("similarity network must not contain self-loops");
        double w = weighted ? (*net.weights)[k] : 1.0;
        adjacency(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = w;
        adjacency(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = w;
    }
    return MarkovProcess::fromAdjacency(adjacency);
}

Eigen::MatrixXd transitionMatrix(const MarkovProcess& mp, double t) { return mp.transition(t); }

double rowStochasticError(const Eigen::MatrixXd& p) {
    return (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double stabilityScore(const MarkovProcess& mp, double t, const Partition& p) {
    return partitionQuality(mp.autocovariance(t), p);
}

} // namespace rolecomm
