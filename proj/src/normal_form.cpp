#include "calabi/normal_form.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace calabi {

namespace {

double tensor_norm(const Tensor3& T) {
    const int n = T.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                s += T(i, j, k) * T(i, j, k);
    return std::sqrt(s);
}

Eigen::VectorXd apply_twice(const Tensor3& T, const Eigen::VectorXd& w) {
    const int n = T.dim();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                s += T(a, b, c) * w(b) * w(c);
        r(a) = s;
    }
    return r;
}

Eigen::MatrixXd slice(const Tensor3& T, const Eigen::VectorXd& w) {
    const int n = T.dim();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double s = 0.0;
            for (int c = 0; c < n; ++c)
                s += T(a, b, c) * w(c);
            M(a, b) = s;
        }
    return M;
}

double cubic_value(const Tensor3& T, const Eigen::VectorXd& w) {
    return apply_twice(T, w).dot(w);
}

struct EuclideanMax {
    Eigen::VectorXd w;
    double mu = 0.0;
    double residual = 0.0;
};

// Maximizes T(w,w,w) on the Euclidean unit sphere. Shifted power iterations
// converge monotonically for a large enough shift; Newton polishing brings
// the critical-point residual near machine precision. Multistarts make the
// largest critical value the global maximum at these dimensions.
EuclideanMax maximize_on_sphere(const Tensor3& T, const NormalFormOptions& opts) {
    const int n = T.dim();
    const double norm = tensor_norm(T);

    if (n == 1) {
        EuclideanMax r;
        r.w = Eigen::VectorXd::Ones(1);
        if (T(0, 0, 0) < 0)
            r.w(0) = -1.0;
        r.mu = std::abs(T(0, 0, 0));
        return r;
    }

    if (norm == 0.0) {
        EuclideanMax r;
        r.w = Eigen::VectorXd::Unit(n, 0);
        return r;
    }

    std::vector<Eigen::VectorXd> starts;
    for (int i = 0; i < n; ++i) {
        starts.push_back(Eigen::VectorXd::Unit(n, i));
        starts.push_back(-Eigen::VectorXd::Unit(n, i));
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(starts.size()) < std::max(opts.multistarts, 2 * n + 8)) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = gauss(rng);
        if (v.norm() > 1e-8)
            starts.push_back(v.normalized());
    }

    const double shift = 2.0 * norm + 1.0;
    EuclideanMax best;
    best.mu = -1.0;

    for (const auto& w0 : starts) {
        Eigen::VectorXd w = w0;
        for (int it = 0; it < opts.power_iterations; ++it) {
            Eigen::VectorXd next = apply_twice(T, w) + shift * w;
            next.normalize();
            if ((next - w).norm() < 1e-15) {
                w = next;
                break;
            }
            w = next;
        }
        double mu = cubic_value(T, w);
        if (mu < 0.0) {
            w = -w;
            mu = -mu;
        }

        // Newton on (w, mu): A(w,w,.) - mu w = 0, |w| = 1. The Jacobian can be
        // singular when the maximizer is not isolated; the minimum-norm
        // least-squares step still contracts the residual.
        for (int it = 0; it < opts.newton_iterations; ++it) {
            Eigen::VectorXd g = apply_twice(T, w) - mu * w;
            if (g.norm() < 1e-14 * (1.0 + norm))
                break;
            Eigen::MatrixXd J(n + 1, n + 1);
            J.topLeftCorner(n, n) = 2.0 * slice(T, w) - mu * Eigen::MatrixXd::Identity(n, n);
            J.topRightCorner(n, 1) = -w;
            J.bottomLeftCorner(1, n) = w.transpose();
            J(n, n) = 0.0;
            Eigen::VectorXd rhs(n + 1);
            rhs.head(n) = -g;
            rhs(n) = -(w.squaredNorm() - 1.0) / 2.0;
            Eigen::VectorXd delta = J.completeOrthogonalDecomposition().solve(rhs);
            Eigen::VectorXd w_next = (w + delta.head(n)).normalized();
            double mu_next = cubic_value(T, w_next);
            if ((apply_twice(T, w_next) - mu_next * w_next).norm() >= g.norm())
                break;
            w = w_next;
            mu = mu_next;
        }
        if (mu < 0.0) {
            w = -w;
            mu = -mu;
        }

        if (mu > best.mu) {
            best.w = w;
            best.mu = mu;
            best.residual = (apply_twice(T, w) - mu * w).norm();
        }
    }

    if (best.residual > opts.criticality_tol * (1.0 + norm))
        throw ConvergenceError("cubic maximization did not reach a critical point", best.residual);
    return best;
}

// Householder basis of the orthogonal complement of the unit vector w.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& w) {
    const int n = static_cast<int>(w.size());
    Eigen::VectorXd u = w - Eigen::VectorXd::Unit(n, 0);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    const double uu = u.squaredNorm();
    if (uu > 1e-28)
        Q -= (2.0 / uu) * (u * u.transpose());
    return Q.rightCols(n - 1);
}

// Ejiri column construction in Euclidean coordinates, first column given.
Eigen::MatrixXd ejiri_columns(const Tensor3& T, const Eigen::VectorXd& w1,
                              const NormalFormOptions& opts) {
    const int n = T.dim();
    Eigen::MatrixXd W(n, n);
    W.col(0) = w1;
    if (n == 1)
        return W;

    const double mu1 = cubic_value(T, w1);
    Eigen::MatrixXd B = complement_basis(w1);
    Eigen::MatrixXd M = B.transpose() * slice(T, w1) * B;
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);

    // descending order
    Eigen::VectorXd mu(n - 1);
    Eigen::MatrixXd U(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i) {
        mu(i) = es.eigenvalues()(n - 2 - i);
        U.col(i) = es.eigenvectors().col(n - 2 - i);
    }
    W.rightCols(n - 1) = B * U;

    // Re-maximize the restricted cubic inside every group of equal mu; this
    // is the refinement that makes A_223 vanish when mu_2 = mu_3.
    const double tie = opts.tie_tol * (1.0 + std::abs(mu1));
    int lo = 0;
    while (lo < n - 1) {
        int hi = lo + 1;
        while (hi < n - 1 && std::abs(mu(hi) - mu(lo)) <= tie)
            ++hi;
        const int size = hi - lo;
        if (size >= 2) {
            Eigen::MatrixXd C = W.middleCols(1 + lo, size);
            Tensor3 Tg = contract_frame(T, C);
            EuclideanMax sub = maximize_on_sphere(Tg, opts);
            Eigen::MatrixXd R = ejiri_columns(Tg, sub.w, opts);
            W.middleCols(1 + lo, size) = C * R;
        }
        lo = hi;
    }

    // Sign convention: a positive diagonal cubic entry on every later vector.
    for (int i = 1; i < n; ++i) {
        Eigen::VectorXd ei = W.col(i);
        if (cubic_value(T, ei) < 0.0)
            W.col(i) = -ei;
    }
    return W;
}

} // namespace

MaximizeResult maximize_cubic(const TensorBundle& bundle, const NormalFormOptions& opts) {
    const int n = bundle.dim;
    if (n < 2)
        throw InvalidArgument("cubic maximization needs n >= 2");
    Eigen::MatrixXd E = g_orthonormal_frame(bundle.metric.G);
    Tensor3 That = contract_frame(bundle.cubic.A, E);
    EuclideanMax m = maximize_on_sphere(That, opts);
    MaximizeResult r;
    r.direction = E * m.w;
    r.mu = m.mu;
    r.residual = m.residual;
    return r;
}

NormalForm build_basis(const TensorBundle& bundle, const Eigen::VectorXd& e1,
                       const NormalFormOptions& opts) {
    const int n = bundle.dim;
    Eigen::MatrixXd E = g_orthonormal_frame(bundle.metric.G);
    Tensor3 That = contract_frame(bundle.cubic.A, E);

    // e1 back to the Euclidean frame; renormalize against rounding.
    Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(bundle.metric.G).matrixL();
    Eigen::VectorXd w1 = (L.transpose() * e1);
    if (w1.norm() == 0.0)
        throw InvalidArgument("e1 must be a nonzero vector");
    w1.normalize();

    Eigen::MatrixXd W = ejiri_columns(That, w1, opts);

    NormalForm nf;
    nf.dim = n;
    nf.basis = E * W;
    nf.frame_cubic = contract_frame(That, W);
    nf.spectrum.resize(n);
    for (int i = 0; i < n; ++i)
        nf.spectrum(i) = nf.frame_cubic(0, i, i);
    double off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                off = std::max(off, std::abs(nf.frame_cubic(0, i, j)));
    nf.max_offdiag = off;
    return nf;
}

int classify_case(const Eigen::VectorXd& spectrum, double tol) {
    const int n = static_cast<int>(spectrum.size());
    const double mu1 = spectrum(0);
    if (mu1 < tol)
        return 0;
    int halves = 0;
    for (int j = 1; j < n; ++j) {
        const double m = spectrum(j);
        if (std::abs(m - mu1 / 2.0) < tol * mu1)
            ++halves;
        else if (std::abs(m) < tol * mu1)
            continue;
        else {
            std::vector<double> spec(spectrum.data(), spectrum.data() + n);
            throw PatternMismatch("mu-spectrum fits no case pattern", spec);
        }
    }
    return halves + 1;
}

std::string case_name(int case_index) {
    return case_index < 0 ? std::string("unclassified") : "C" + std::to_string(case_index);
}

NormalForm normal_form_at(const TensorBundle& bundle, const NormalFormOptions& opts) {
    MaximizeResult m = maximize_cubic(bundle, opts);
    NormalForm nf = build_basis(bundle, m.direction, opts);
    nf.case_index = classify_case(nf.spectrum, opts.tie_tol);
    return nf;
}

} // namespace calabi
