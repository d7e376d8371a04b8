#include "calabi/simdiag.hpp"

#include <cmath>
#include <random>
#include <string>

namespace calabi {

namespace {

double scalar_distance(const Eigen::MatrixXd& a) {
    const int d = static_cast<int>(a.rows());
    const double mean = a.trace() / d;
    return (a - mean * Eigen::MatrixXd::Identity(d, d)).norm();
}

// Columns of the returned matrix form an orthonormal basis diagonalizing
// every member of `fam`.
Eigen::MatrixXd joint_basis(const std::vector<Eigen::MatrixXd>& fam, std::mt19937_64& rng) {
    const int d = static_cast<int>(fam.front().rows());
    if (d == 1)
        return Eigen::MatrixXd::Identity(1, 1);

    // Members within rounding of a scalar matrix are diagonal in any basis.
    std::vector<int> active;
    double scale = 0.0;
    for (int k = 0; k < static_cast<int>(fam.size()); ++k) {
        scale = std::max(scale, fam[k].norm());
        if (scalar_distance(fam[k]) > 1e-12 * (1.0 + fam[k].norm()))
            active.push_back(k);
    }
    if (active.empty())
        return Eigen::MatrixXd::Identity(d, d);

    std::uniform_real_distribution<double> weight(0.5, 1.5);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    for (int k : active)
        M += weight(rng) * fam[k];

    auto cluster_bounds = [d](const Eigen::VectorXd& vals) {
        const double radius = std::max(std::abs(vals(0)), std::abs(vals(d - 1)));
        const double gap = 1e-8 * std::max(radius, 1e-300);
        std::vector<int> bounds{0};
        for (int i = 1; i < d; ++i)
            if (vals(i) - vals(i - 1) > gap)
                bounds.push_back(i);
        bounds.push_back(d);
        return bounds;
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    std::vector<int> bounds = cluster_bounds(es.eigenvalues());

    if (bounds.size() == 2) {
        // The random combination collapsed onto (numerically) one eigenvalue
        // even though some member is non-scalar: split along the member with
        // the widest spectrum instead.
        int best = active.front();
        for (int k : active)
            if (scalar_distance(fam[k]) > scalar_distance(fam[best]))
                best = k;
        es.compute(fam[best]);
        bounds = cluster_bounds(es.eigenvalues());
        if (bounds.size() == 2)
            return es.eigenvectors(); // nothing left to separate
    }

    Eigen::MatrixXd V = es.eigenvectors();
    for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
        const int lo = bounds[c];
        const int size = bounds[c + 1] - lo;
        if (size <= 1)
            continue;
        Eigen::MatrixXd Vc = V.middleCols(lo, size);
        std::vector<Eigen::MatrixXd> sub;
        sub.reserve(active.size());
        for (int k : active) {
            Eigen::MatrixXd b = Vc.transpose() * fam[k] * Vc;
            sub.push_back(0.5 * (b + b.transpose()));
        }
        V.middleCols(lo, size) = Vc * joint_basis(sub, rng);
    }
    return V;
}

} // namespace

void SymFamily::validate() const {
    if (matrices.empty())
        throw InvalidArgument("empty matrix family");
    const int d = static_cast<int>(matrices.front().rows());
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const auto& a = matrices[k];
        if (a.rows() != d || a.cols() != d)
            throw InvalidArgument("family matrices must be square and of equal size");
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
            throw InvalidArgument("matrix " + std::to_string(k + 1) + " is not symmetric");
    }
    for (std::size_t i = 0; i < matrices.size(); ++i)
        for (std::size_t j = i + 1; j < matrices.size(); ++j) {
            const auto& a = matrices[i];
            const auto& b = matrices[j];
            const double comm = (a * b - b * a).norm();
            if (comm > commute_tol * std::max(a.norm() * b.norm(), 1e-30))
                throw CommutatorError("matrices " + std::to_string(i + 1) + " and " +
                                      std::to_string(j + 1) + " do not commute (||[A,B]|| = " +
                                      std::to_string(comm) + ")");
        }
}

SimDiagResult simultaneous_diagonalize(const SymFamily& family, std::uint64_t seed) {
    family.validate();
    const int d = static_cast<int>(family.matrices.front().rows());
    const int m = static_cast<int>(family.matrices.size());

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd V = joint_basis(family.matrices, rng);

    SimDiagResult r;
    r.P = V.transpose();
    r.eigenvalues.resize(m, d);
    r.orthogonality = (r.P.transpose() * r.P - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();

    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
        Eigen::MatrixXd D = r.P * family.matrices[k] * r.P.transpose();
        r.eigenvalues.row(k) = D.diagonal();
        const double denom = 1.0 + family.matrices[k].norm();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j)
                    worst = std::max(worst, std::abs(D(i, j)) / denom);
    }
    r.max_offdiag = worst;

    if (r.orthogonality > 1e-10)
        throw ConvergenceError("joint eigenbasis lost orthogonality", r.orthogonality);
    if (worst > 1e-9)
        throw ConvergenceError("family could not be jointly diagonalized", worst);
    return r;
}

} // namespace calabi
