#include <doctest.h>

#include <cmath>

#include "calabi/catalog.hpp"
#include "calabi/jet.hpp"
#include "calabi/normal_form.hpp"
#include "calabi/reconstruct.hpp"
#include "calabi/tensor.hpp"
#include "support.hpp"

using namespace calabi;
using calabi_test::uniform;

TEST_CASE("zero cubic data integrates to a paraboloid ray") {
    FlatParallelData d{2, {}, {1.0, 1.0}};
    IntegrationResult r = integrate_frames(d, 1000);
    CHECK(r.x_end(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x_end(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x_end(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single log direction reproduces the exponential solution") {
    FlatParallelData d{2, {1.0}, {1.0, 0.5}};
    Eigen::VectorXd x = closed_form(d);
    CHECK(x(0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    CHECK(x(1) == doctest::Approx(0.5));
    CHECK(x(2) == doctest::Approx((std::exp(1.0) - 1.0) - 1.0 + 0.125).epsilon(1e-14));
}

TEST_CASE("closed form for two log directions") {
    FlatParallelData d{2, {1.0, 1.0}, {1.0, 1.0}};
    Eigen::VectorXd x = closed_form(d);
    const double e1 = std::exp(1.0) - 1.0;
    CHECK(x(0) == doctest::Approx(e1));
    CHECK(x(1) == doctest::Approx(e1));
    CHECK(x(2) == doctest::Approx(2.0 * e1 - 2.0));
}

TEST_CASE("integrator agrees with the closed form") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int r = static_cast<int>(rng() % (n + 1));
        FlatParallelData d;
        d.dim = n;
        for (int i = 0; i < r; ++i)
            d.diag.push_back(uniform(rng, 0.4, 2.0));
        std::sort(d.diag.begin(), d.diag.end(), std::greater<double>());
        for (int i = 0; i < n; ++i)
            d.v.push_back(uniform(rng, 0.3, 1.5));
        IntegrationResult res = integrate_frames(d, 10000);
        CHECK((res.x_end - closed_form(d)).norm() < 1e-9);
        CHECK(res.error_estimate < 1e-9);
    }
}

TEST_CASE("too few steps is reported") {
    FlatParallelData d{2, {2.0}, {1.5, 1.0}};
    CHECK_THROWS_AS(integrate_frames(d, 2), ConvergenceError);
}

TEST_CASE("data validation") {
    CHECK_THROWS_AS(closed_form(FlatParallelData{2, {1.0, 2.0}, {1.0, 1.0}}),
                    InvalidArgument); // not descending
    CHECK_THROWS_AS(closed_form(FlatParallelData{2, {-1.0}, {1.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(closed_form(FlatParallelData{2, {1.0}, {1.0}}), InvalidArgument);
    CHECK_THROWS_AS(closed_form(FlatParallelData{2, {1.0}, {1.0, -1.0}}), InvalidArgument);
    CHECK_THROWS_AS(closed_form(FlatParallelData{1, {1.0, 1.0}, {1.0}}), InvalidArgument);
}

TEST_CASE("recovered functions are the Q family") {
    FlatParallelData d1{2, {1.0}, {1.0, 1.0}};
    CHECK(recovered_surface(d1).id() == "q:1:2");

    FlatParallelData d2{2, {2.0}, {1.0, 1.0}};
    CHECK(recovered_surface(d2).id() == "q:0.25:2");

    FlatParallelData d0{3, {}, {1.0, 1.0, 1.0}};
    CHECK(recovered_surface(d0).id() == "paraboloid:3");
}

TEST_CASE("round trip reproduces the diagonal cubic data") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int r = 1 + static_cast<int>(rng() % n);
        FlatParallelData d;
        d.dim = n;
        for (int i = 0; i < r; ++i)
            d.diag.push_back(uniform(rng, 0.5, 2.0));
        std::sort(d.diag.begin(), d.diag.end(), std::greater<double>());
        d.v.assign(n, 1.0);

        CatalogSurface s = recovered_surface(d);
        auto pts = s.sample_points(3, 2000 + trial);
        for (const auto& x : pts) {
            TensorBundle b = bundle_at(eval_jet(s.as_function(), x, 4));
            std::vector<double> diag = frame_cubic_diagonal(b);
            for (int i = 0; i < n; ++i) {
                const double want = i < r ? d.diag[i] : 0.0;
                CHECK(std::abs(diag[i] - want) < 1e-7);
            }
        }
    }
}

TEST_CASE("integrated endpoint lies on the recovered graph") {
    // invert the first n coordinates of x(1) for v, then compare the height
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int r = 1 + static_cast<int>(rng() % n);
        FlatParallelData d;
        d.dim = n;
        for (int i = 0; i < r; ++i)
            d.diag.push_back(uniform(rng, 0.5, 1.8));
        std::sort(d.diag.begin(), d.diag.end(), std::greater<double>());
        for (int i = 0; i < n; ++i)
            d.v.push_back(uniform(rng, 0.4, 1.2));

        Eigen::VectorXd x = integrate_frames(d, 20000).x_end;
        double height = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i < r) {
                const double a = d.diag[i];
                const double vi = std::log(a * x(i) + 1.0) / a;
                CHECK(vi == doctest::Approx(d.v[i]).epsilon(1e-9));
                height += (std::exp(a * vi) - 1.0) / (a * a) - vi / a;
            } else {
                height += 0.5 * x(i) * x(i);
            }
        }
        CHECK(std::abs(x(n) - height) < 1e-8);
    }
}

TEST_CASE("hyperbolic frame integration reproduces the parametrization") {
    std::mt19937_64 rng(20);
    for (double c : {0.5, 1.0, 2.0}) {
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::Vector3d from(uniform(rng, -0.5, 0.5), uniform(rng, 0.2, 1.0),
                                 uniform(rng, 0.0, 1.0));
            Eigen::Vector3d to(uniform(rng, -0.5, 0.5), uniform(rng, 0.2, 2.0),
                               uniform(rng, 0.0, 2.0));
            Eigen::Vector4d xi = integrate_hyperbolic_frames(c, from, to, 4000);
            Eigen::Vector4d xc = logcone_param(c, to(0), to(1), to(2));
            CHECK((xi - xc).norm() < 1e-8);
        }
    }
    CHECK_THROWS_AS(
        integrate_hyperbolic_frames(1.0, Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 1, 0), 100),
        InvalidArgument);
}
