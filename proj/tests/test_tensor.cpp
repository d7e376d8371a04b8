#include <doctest.h>

#include <cmath>

#include "calabi/catalog.hpp"
#include "calabi/tensor.hpp"
#include "support.hpp"

using namespace calabi;
using calabi_test::fd_partial;
using calabi_test::uniform;

TEST_CASE("paraboloid metric is the identity") {
    FunctionSpec f = CatalogSurface::paraboloid(2).as_function();
    MetricData m = metric_at(eval_jet(f, {17.0, -3.0}, 2));
    CHECK((m.G - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK(m.detG == doctest::Approx(1.0));
    CHECK((m.G * m.Ginv - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("Q metric at x1 = 1 is diag(c1, 1)") {
    FunctionSpec f = CatalogSurface::q({2.5}, 2).as_function();
    MetricData m = metric_at(eval_jet(f, {1.0, 0.7}, 2));
    CHECK(m.G(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.G(1, 1) == doctest::Approx(1.0));
    CHECK(m.G(0, 1) == 0.0);
}

TEST_CASE("non-convex points are rejected with a spectral hint") {
    FunctionSpec f = parse("x1^3 + 0.5*x2^2");
    CHECK_THROWS_AS(metric_at(eval_jet(f, {-1.0, 0.0}, 2)), NotPositiveDefinite);
    try {
        metric_at(eval_jet(f, {-1.0, 0.0}, 2));
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.min_eigenvalue < 0.0);
    }
    // log cone Hessian is positive definite inside the cone only
    FunctionSpec lc = CatalogSurface::log_cone(1.0).as_function();
    CHECK_NOTHROW(metric_at(eval_jet(lc, {2.0, 1.0, 1.0}, 2)));
}

TEST_CASE("paraboloid cubic data vanishes") {
    FunctionSpec f = CatalogSurface::paraboloid(3).as_function();
    CubicData c = cubic_at(eval_jet(f, {0.3, -1.0, 2.0}, 4));
    CHECK(c.covA_norm2 == 0.0);
    for (int i = 0; i < 3; ++i)
        CHECK(c.A(i, i, i) == 0.0);
}

TEST_CASE("Q cubic has the single closed-form component") {
    const double c1 = 1.7;
    FunctionSpec f = CatalogSurface::q({c1}, 2).as_function();
    const double x1 = 0.8;
    CubicData c = cubic_at(eval_jet(f, {x1, 1.1}, 4));
    CHECK(c.A(0, 0, 0) == doctest::Approx(c1 / (x1 * x1 * x1)).epsilon(1e-14));
    CHECK(c.A(0, 0, 1) == 0.0);
    CHECK(c.A(0, 1, 1) == 0.0);
    CHECK(c.A(1, 1, 1) == 0.0);
}

TEST_CASE("Q has parallel cubic form at random domain points") {
    std::mt19937_64 rng(5);
    CatalogSurface s = CatalogSurface::q({0.4, 2.0, 3.1}, 3);
    FunctionSpec f = s.as_function();
    for (const auto& x : s.sample_points(25, 99)) {
        CubicData c = cubic_at(eval_jet(f, x, 4));
        CHECK(std::sqrt(c.covA_norm2) < 1e-9);
    }
    (void)rng;
}

TEST_CASE("Codazzi symmetry holds for random convex functions") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 2);
        FunctionSpec f = calabi_test::random_quartic_log(dim, rng);
        std::vector<double> x = calabi_test::random_quartic_log_point(dim, rng);
        CubicData c = cubic_at(eval_jet(f, x, 4));
        const double scale = 1.0 + std::sqrt(c.covA_norm2);
        double worst = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l)
                        worst = std::max(worst,
                                         std::abs((*c.covA)(i, j, k, l) - (*c.covA)(i, j, l, k)));
        CHECK(worst < 1e-9 * scale);
    }
}

TEST_CASE("curvature symmetries and the first Bianchi identity") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 2);
        FunctionSpec f = calabi_test::random_quartic_log(dim, rng);
        std::vector<double> x = calabi_test::random_quartic_log_point(dim, rng);
        CurvatureData r = curvature_at(eval_jet(f, x, 3));
        double scale = 1.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l)
                        scale = std::max(scale, std::abs(r.riem(i, j, k, l)));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l) {
                        CHECK(std::abs(r.riem(i, j, k, l) + r.riem(j, i, k, l)) < 1e-10 * scale);
                        CHECK(std::abs(r.riem(i, j, k, l) + r.riem(i, j, l, k)) < 1e-10 * scale);
                        CHECK(std::abs(r.riem(i, j, k, l) - r.riem(k, l, i, j)) < 1e-10 * scale);
                        CHECK(std::abs(r.riem(i, j, k, l) + r.riem(j, k, i, l) +
                                       r.riem(k, i, j, l)) < 1e-10 * scale);
                    }
        CHECK(r.scalar_discrepancy < 1e-10 * (1.0 + std::abs(r.scalar_trace)));
    }
}

TEST_CASE("Tchebychev covector equals the log-det gradient") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 2);
        FunctionSpec f = calabi_test::random_quartic_log(dim, rng);
        std::vector<double> x = calabi_test::random_quartic_log_point(dim, rng);
        CurvatureData r = curvature_at(eval_jet(f, x, 3));
        auto logdet = [&](const std::vector<double>& p) {
            return std::log(metric_at(eval_jet(f, p, 2)).detG);
        };
        for (int l = 0; l < dim; ++l) {
            const double fd = fd_partial(logdet, x, {l}, 1e-4);
            CHECK(std::abs(r.tcheb_cov(l) + fd / (2.0 * dim)) < 1e-10 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("Gauss-equation curvature matches the Christoffel holonomy") {
    // structural check of the normalization: the coordinate curvature built
    // from finite differences of Gamma must reproduce riem via
    // riem(i,j,k,l) = -G_{lm} K^m_{kij}
    std::mt19937_64 rng(13);
    std::vector<std::pair<FunctionSpec, std::vector<double>>> cases;
    cases.emplace_back(CatalogSurface::log_cone(1.0).as_function(),
                       std::vector<double>{2.0, 1.0, 0.5});
    FunctionSpec rf2 = calabi_test::random_quartic_log(2, rng);
    cases.emplace_back(rf2, calabi_test::random_quartic_log_point(2, rng));
    FunctionSpec rf3 = calabi_test::random_quartic_log(3, rng);
    cases.emplace_back(rf3, calabi_test::random_quartic_log_point(3, rng));

    for (const auto& [f, x] : cases) {
        const int n = f.dim;
        const double h = 1e-4;
        TensorBundle b = bundle_at(eval_jet(f, x, 4));

        std::vector<Tensor3> dGamma(n, Tensor3(n));
        for (int i = 0; i < n; ++i) {
            auto D = [&](double step) {
                auto hi = x, lo = x;
                hi[i] += step;
                lo[i] -= step;
                CubicData ch = cubic_at(eval_jet(f, hi, 3));
                CubicData cl = cubic_at(eval_jet(f, lo, 3));
                Tensor3 d(n);
                for (int l = 0; l < n; ++l)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            d(l, j, k) = (ch.Gamma(l, j, k) - cl.Gamma(l, j, k)) / (2.0 * step);
                return d;
            };
            Tensor3 coarse = D(h), fine = D(h / 2.0);
            for (int l = 0; l < n; ++l)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        dGamma[i](l, j, k) = (4.0 * fine(l, j, k) - coarse(l, j, k)) / 3.0;
        }

        double scale = 1.0, worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double lowered = 0.0;
                        for (int m = 0; m < n; ++m) {
                            double Km = dGamma[i](m, j, k) - dGamma[j](m, i, k);
                            for (int mm = 0; mm < n; ++mm)
                                Km += b.cubic.Gamma(mm, j, k) * b.cubic.Gamma(m, i, mm) -
                                      b.cubic.Gamma(mm, i, k) * b.cubic.Gamma(m, j, mm);
                            lowered += b.metric.G(l, m) * Km;
                        }
                        worst = std::max(worst, std::abs(b.curv.riem(i, j, k, l) + lowered));
                        scale = std::max(scale, std::abs(b.curv.riem(i, j, k, l)));
                    }
        CHECK(worst < 1e-5 * scale);
    }
}

TEST_CASE("parallel right-hand sides vanish on parallel surfaces") {
    auto pr0 = parallel_rhs_checks(
        eval_jet(CatalogSurface::paraboloid(2).as_function(), {1.0, 2.0}, 4));
    CHECK(pr0.first == 0.0);
    CHECK(pr0.second == 0.0);

    CatalogSurface q = CatalogSurface::q({1.3, 0.7}, 2);
    for (const auto& x : q.sample_points(20, 3)) {
        auto pr = parallel_rhs_checks(eval_jet(q.as_function(), x, 4));
        CHECK(pr.first < 1e-9);
        CHECK(pr.second < 1e-9);
    }

    CatalogSurface lc = CatalogSurface::log_cone(1.0);
    for (const auto& x : lc.sample_points(20, 4)) {
        auto pr = parallel_rhs_checks(eval_jet(lc.as_function(), x, 4));
        CHECK(pr.first < 1e-8);
        CHECK(pr.second < 1e-8);
    }
}

TEST_CASE("extremal residual vanishes on the catalog") {
    FunctionSpec pb = CatalogSurface::paraboloid(2).as_function();
    CHECK(extremal_residual(eval_jet(pb, {5.0, -2.0}, 4)) == 0.0);

    CatalogSurface q = CatalogSurface::q({0.5, 1.5, 2.5}, 3);
    for (const auto& x : q.sample_points(20, 8))
        CHECK(std::abs(extremal_residual(eval_jet(q.as_function(), x, 4))) < 1e-8);

    CatalogSurface lc = CatalogSurface::log_cone(1.0);
    CHECK(std::abs(extremal_residual(eval_jet(lc.as_function(), {2.0, 1.0, 0.0}, 4))) < 1e-8);
    for (const auto& x : lc.sample_points(50, 9))
        CHECK(std::abs(extremal_residual(eval_jet(lc.as_function(), x, 4))) < 1e-8);

    // a generic convex function is not extremal
    FunctionSpec g = parse("x1^4 + 0.5*x1^2 + 0.5*x2^2");
    CHECK(std::abs(extremal_residual(eval_jet(g, {0.9, 0.4}, 4))) > 1e-3);
}

TEST_CASE("Q scalar invariants match the closed forms") {
    const std::vector<double> cs{0.7, 1.9};
    CatalogSurface s = CatalogSurface::q(cs, 3);
    const double inv_sum = 1.0 / cs[0] + 1.0 / cs[1];
    for (const auto& x : s.sample_points(30, 66)) {
        TensorBundle b = bundle_at(eval_jet(s.as_function(), x, 4));
        CHECK(b.curv.pick_J == doctest::Approx(inv_sum / 6.0).epsilon(1e-10));
        CHECK(b.curv.tcheb_norm2 == doctest::Approx(inv_sum / 9.0).epsilon(1e-10));
        CHECK(std::abs(b.curv.scalar_trace) < 1e-9);
        CHECK(std::sqrt(b.curv.riem_norm2) < 1e-9);
    }
}

TEST_CASE("log cone scalar invariants match the closed forms") {
    for (double c : {0.5, 1.0, 2.0}) {
        CatalogSurface s = CatalogSurface::log_cone(c);
        for (const auto& x : s.sample_points(20, 123)) {
            TensorBundle b = bundle_at(eval_jet(s.as_function(), x, 4));
            CHECK(b.curv.pick_J == doctest::Approx(7.0 * c * c / 6.0).epsilon(1e-9));
            CHECK(b.curv.scalar_trace == doctest::Approx(-2.0 * c * c).epsilon(1e-9));
            CHECK(b.curv.tcheb_norm2 == doctest::Approx(c * c).epsilon(1e-9));
        }
    }
}

TEST_CASE("Pick invariant rejects n = 1") {
    FunctionSpec f = parse("-ln(x1)");
    CHECK_THROWS_AS(curvature_at(eval_jet(f, {1.0}, 3)), InvalidArgument);
}
