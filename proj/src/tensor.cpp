#include "calabi/tensor.hpp"

#include <cmath>

namespace calabi {

namespace {

Eigen::MatrixXd hessian_of(const Jet4& jet) {
    const int n = jet.dim();
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            H(i, j) = H(j, i) = jet.d2(i, j);
    return H;
}

} // namespace

Tensor3 contract_frame(const Tensor3& A, const Eigen::MatrixXd& E) {
    const int n = A.dim();
    const int m = static_cast<int>(E.cols());
    Tensor3 step1(n), step2(n), out(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += A(i, j, k) * E(k, c);
                step1(i, j, c) = s;
            }
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    s += step1(i, j, c) * E(j, b);
                step2(i, b, c) = s;
            }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    s += step2(i, b, c) * E(i, a);
                out(a, b, c) = s;
            }
    return out;
}

Eigen::MatrixXd g_orthonormal_frame(const Eigen::MatrixXd& G) {
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        throw NotPositiveDefinite("metric is not positive definite", es.eigenvalues().minCoeff());
    }
    const int n = static_cast<int>(G.rows());
    Eigen::MatrixXd Lt = llt.matrixL().transpose();
    return Lt.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
}

MetricData metric_at(const Jet4& jet) {
    if (jet.order() < 2)
        throw InvalidArgument("metric needs a jet of order >= 2");
    const int n = jet.dim();
    MetricData m;
    m.dim = n;
    m.G = hessian_of(jet);

    Eigen::LLT<Eigen::MatrixXd> llt(m.G);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.G, Eigen::EigenvaluesOnly);
        throw NotPositiveDefinite("Hessian is not positive definite at the point",
                                  es.eigenvalues().minCoeff());
    }
    m.Ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    double det = 1.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < n; ++i)
        det *= L(i, i) * L(i, i);
    m.detG = det;
    return m;
}

CubicData cubic_at(const Jet4& jet) {
    if (jet.order() < 3)
        throw InvalidArgument("cubic form needs a jet of order >= 3");
    const MetricData metric = metric_at(jet);
    const int n = jet.dim();

    CubicData c;
    c.dim = n;
    c.A = Tensor3(n);
    c.Gamma = Tensor3(n);

    Tensor3 f3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                f3(i, j, k) = jet.d3(i, j, k);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                c.A(i, j, k) = -0.5 * f3(i, j, k);

    // Gamma^k_ij = (1/2) f^{kl} f_ijl
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += metric.Ginv(k, l) * f3(i, j, l);
                c.Gamma(k, i, j) = 0.5 * s;
            }

    if (jet.order() >= 4) {
        Tensor4 cov(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double s = -0.5 * jet.d4(i, j, k, l);
                        for (int m = 0; m < n; ++m)
                            s -= c.Gamma(m, l, i) * c.A(m, j, k) +
                                 c.Gamma(m, l, j) * c.A(i, m, k) +
                                 c.Gamma(m, l, k) * c.A(i, j, m);
                        cov(i, j, k, l) = s;
                    }

        // ||covA||^2 with four raised indices
        double norm2 = 0.0;
        Tensor4 raised = cov;
        // raise one slot at a time
        for (int slot = 0; slot < 4; ++slot) {
            Tensor4 next(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            double s = 0.0;
                            for (int m = 0; m < n; ++m) {
                                switch (slot) {
                                case 0: s += metric.Ginv(i, m) * raised(m, j, k, l); break;
                                case 1: s += metric.Ginv(j, m) * raised(i, m, k, l); break;
                                case 2: s += metric.Ginv(k, m) * raised(i, j, m, l); break;
                                case 3: s += metric.Ginv(l, m) * raised(i, j, k, m); break;
                                }
                            }
                            next(i, j, k, l) = s;
                        }
            raised = next;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        norm2 += raised(i, j, k, l) * cov(i, j, k, l);
        c.covA = std::move(cov);
        c.covA_norm2 = norm2;
    }
    return c;
}

namespace {

CurvatureData curvature_from(const MetricData& metric, const CubicData& cubic) {
    const int n = metric.dim;
    CurvatureData r;
    r.dim = n;

    // R_ijkl = f^{mh} (A_jkm A_hil - A_ikm A_hjl)
    r.riem = Tensor4(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m)
                        for (int h = 0; h < n; ++h)
                            s += metric.Ginv(m, h) * (cubic.A(j, k, m) * cubic.A(h, i, l) -
                                                      cubic.A(i, k, m) * cubic.A(h, j, l));
                    r.riem(i, j, k, l) = s;
                }

    // R_ik = f^{jl} R_ijkl
    r.ric = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    s += metric.Ginv(j, l) * r.riem(i, j, k, l);
            r.ric(i, k) = s;
        }

    r.scalar_trace = (metric.Ginv.cwiseProduct(r.ric)).sum();

    // Tchebychev: S_k = G^{ij} A_ijk, T_k = S_k / n, T^l = G^{lk} T_k
    Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s += metric.Ginv(i, j) * cubic.A(i, j, k);
        S(k) = s;
    }
    r.tcheb_cov = S / n;
    r.tcheb_vec = metric.Ginv * r.tcheb_cov;
    r.tcheb_norm2 = r.tcheb_vec.dot(r.tcheb_cov);

    // J = (1/(n(n-1))) ||A||^2 (fully raised contraction); n >= 2 required.
    Tensor3 Araised(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c2 = 0; c2 < n; ++c2)
                            s += metric.Ginv(i, a) * metric.Ginv(j, b) * metric.Ginv(k, c2) *
                                 cubic.A(a, b, c2);
                Araised(i, j, k) = s;
            }
    double a_norm2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a_norm2 += Araised(i, j, k) * cubic.A(i, j, k);
    if (n < 2)
        throw InvalidArgument("Pick invariant needs n >= 2");
    r.pick_J = a_norm2 / (n * (n - 1));

    r.scalar_pick = n * (n - 1) * r.pick_J - double(n) * n * r.tcheb_norm2;
    r.scalar_discrepancy = std::abs(r.scalar_trace - r.scalar_pick);

    // ||Riem||^2, raising one index at a time
    Tensor4 raised = r.riem;
    for (int slot = 0; slot < 4; ++slot) {
        Tensor4 next(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double s = 0.0;
                        for (int m = 0; m < n; ++m) {
                            switch (slot) {
                            case 0: s += metric.Ginv(i, m) * raised(m, j, k, l); break;
                            case 1: s += metric.Ginv(j, m) * raised(i, m, k, l); break;
                            case 2: s += metric.Ginv(k, m) * raised(i, j, m, l); break;
                            case 3: s += metric.Ginv(l, m) * raised(i, j, k, m); break;
                            }
                        }
                        next(i, j, k, l) = s;
                    }
        raised = next;
    }
    double riem_norm2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    riem_norm2 += raised(i, j, k, l) * r.riem(i, j, k, l);
    r.riem_norm2 = riem_norm2;
    return r;
}

} // namespace

CurvatureData curvature_at(const Jet4& jet) {
    if (jet.order() < 3)
        throw InvalidArgument("curvature needs a jet of order >= 3");
    const MetricData metric = metric_at(jet);
    const CubicData cubic = cubic_at(jet);
    CurvatureData r = curvature_from(metric, cubic);
    if (cubic.covA)
        r.covA_norm2 = cubic.covA_norm2;
    return r;
}

TensorBundle bundle_at(const Jet4& jet) {
    TensorBundle b;
    b.dim = jet.dim();
    b.point = jet.point();
    b.metric = metric_at(jet);
    b.cubic = cubic_at(jet);
    b.curv = curvature_from(b.metric, b.cubic);
    if (b.cubic.covA)
        b.curv.covA_norm2 = b.cubic.covA_norm2;
    return b;
}

std::pair<double, double> parallel_rhs_checks(const TensorBundle& b) {
    const int n = b.dim;
    const auto& Ginv = b.metric.Ginv;

    // first: Ric(T#, T#)
    double first = b.curv.tcheb_vec.dot(b.curv.ric * b.curv.tcheb_vec);

    // second: ||Riem||^2 + Ric^{ij} B_ij with B_ij = A_ipq A_jp'q' G^{pp'} G^{qq'}
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    for (int p2 = 0; p2 < n; ++p2)
                        for (int q2 = 0; q2 < n; ++q2)
                            s += b.cubic.A(i, p, q) * b.cubic.A(j, p2, q2) * Ginv(p, p2) * Ginv(q, q2);
            B(i, j) = s;
        }
    Eigen::MatrixXd ric_raised = Ginv * b.curv.ric * Ginv;
    double second = b.curv.riem_norm2 + (ric_raised.cwiseProduct(B)).sum();
    return {std::abs(first), std::abs(second)};
}

std::pair<double, double> parallel_rhs_checks(const Jet4& jet) {
    return parallel_rhs_checks(bundle_at(jet));
}

double extremal_residual(const Jet4& jet) {
    if (jet.order() < 4)
        throw InvalidArgument("extremal residual needs a jet of order 4");
    const int n = jet.dim();
    const MetricData metric = metric_at(jet);
    const CubicData cubic = cubic_at(jet);
    const auto& Ginv = metric.Ginv;

    // phi = ln det Hess f: phi_l = f^{ij} f_ijl,
    // phi_kl = f^{ij} f_ijkl - f^{ia} f_abk f^{bj} f_ijl.
    Eigen::VectorXd phi1 = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s += Ginv(i, j) * jet.d3(i, j, l);
        phi1(l) = s;
    }

    Eigen::MatrixXd phi2 = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s += Ginv(i, j) * jet.d4(i, j, k, l);
            for (int i = 0; i < n; ++i)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int j = 0; j < n; ++j)
                            s -= Ginv(i, a) * jet.d3(a, b, k) * Ginv(b, j) * jet.d3(i, j, l);
            phi2(k, l) = s;
        }

    // Delta phi = G^{kl} (phi_kl - Gamma^m_kl phi_m)
    double res = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            double t = phi2(k, l);
            for (int m = 0; m < n; ++m)
                t -= cubic.Gamma(m, k, l) * phi1(m);
            res += Ginv(k, l) * t;
        }
    return res;
}

} // namespace calabi
