#include "calabi/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "calabi/simdiag.hpp"

namespace calabi {

void FlatParallelData::validate() const {
    if (dim < 1)
        throw InvalidArgument("flat-parallel data needs n >= 1");
    if (r() > dim)
        throw InvalidArgument("more diagonal values than dimensions");
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0))
            throw InvalidArgument("diagonal cubic values must be positive");
        if (i > 0 && diag[i] > diag[i - 1])
            throw InvalidArgument("diagonal cubic values must be non-increasing");
    }
    if (static_cast<int>(v.size()) != dim)
        throw InvalidArgument("target coordinates must have length n");
    for (double vi : v)
        if (!(vi > 0.0))
            throw InvalidArgument("target coordinates must be positive");
}

namespace {

// State: n frame vectors in R^{n+1} followed by the position.
struct FrameState {
    std::vector<Eigen::VectorXd> e;
    Eigen::VectorXd x;
};

FrameState rk4_frames(const FlatParallelData& d, int steps) {
    const int n = d.dim;
    const double h = 1.0 / steps;
    Eigen::VectorXd vertical = Eigen::VectorXd::Zero(n + 1);
    vertical(n) = 1.0;

    FrameState s;
    s.e.resize(n);
    for (int i = 0; i < n; ++i)
        s.e[i] = Eigen::VectorXd::Unit(n + 1, i);
    s.x = Eigen::VectorXd::Zero(n + 1);

    auto a = [&](int i) { return i < d.r() ? d.diag[i] : 0.0; };

    // autonomous linear system; derivative of a state copy
    auto deriv = [&](const FrameState& st) {
        FrameState ds;
        ds.e.resize(n);
        ds.x = Eigen::VectorXd::Zero(n + 1);
        for (int i = 0; i < n; ++i) {
            ds.e[i] = a(i) * d.v[i] * st.e[i] + d.v[i] * vertical;
            ds.x += d.v[i] * st.e[i];
        }
        return ds;
    };
    auto axpy = [&](const FrameState& st, double c, const FrameState& k) {
        FrameState r = st;
        for (int i = 0; i < n; ++i)
            r.e[i] += c * k.e[i];
        r.x += c * k.x;
        return r;
    };

    for (int step = 0; step < steps; ++step) {
        FrameState k1 = deriv(s);
        FrameState k2 = deriv(axpy(s, h / 2.0, k1));
        FrameState k3 = deriv(axpy(s, h / 2.0, k2));
        FrameState k4 = deriv(axpy(s, h, k3));
        for (int i = 0; i < n; ++i)
            s.e[i] += (h / 6.0) * (k1.e[i] + 2.0 * k2.e[i] + 2.0 * k3.e[i] + k4.e[i]);
        s.x += (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    }
    return s;
}

} // namespace

IntegrationResult integrate_frames(const FlatParallelData& data, int steps) {
    data.validate();
    if (steps < 2)
        throw InvalidArgument("integrate_frames needs steps >= 2");
    FrameState full = rk4_frames(data, steps);
    FrameState half = rk4_frames(data, steps / 2);

    IntegrationResult r;
    r.x_end = full.x;
    r.frames_end = full.e;
    r.error_estimate = (full.x - half.x).norm() / 15.0;
    if (r.error_estimate > 1e-6)
        throw ConvergenceError("step count too small for the frame integration",
                               r.error_estimate);
    return r;
}

Eigen::VectorXd closed_form(const FlatParallelData& data) {
    data.validate();
    const int n = data.dim;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
    double height = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i < data.r()) {
            const double a = data.diag[i];
            const double grow = std::exp(a * data.v[i]) - 1.0;
            x(i) = grow / a;
            height += grow / (a * a) - data.v[i] / a;
        } else {
            x(i) = data.v[i];
            height += 0.5 * data.v[i] * data.v[i];
        }
    }
    x(n) = height;
    return x;
}

CatalogSurface recovered_surface(const FlatParallelData& data) {
    data.validate();
    if (data.r() == 0)
        return CatalogSurface::paraboloid(data.dim);
    std::vector<double> c(data.diag.size());
    for (std::size_t i = 0; i < data.diag.size(); ++i)
        c[i] = 1.0 / (data.diag[i] * data.diag[i]);
    return CatalogSurface::q(std::move(c), data.dim);
}

FunctionSpec recovered_function(const FlatParallelData& data) {
    return recovered_surface(data).as_function();
}

std::vector<double> frame_cubic_diagonal(const TensorBundle& bundle, std::uint64_t seed) {
    const int n = bundle.dim;
    Eigen::MatrixXd E = g_orthonormal_frame(bundle.metric.G);
    Tensor3 That = contract_frame(bundle.cubic.A, E);

    SymFamily fam;
    for (int k = 0; k < n; ++k) {
        Eigen::MatrixXd S(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                S(a, b) = That(a, b, k);
        fam.matrices.push_back(0.5 * (S + S.transpose()));
    }
    SimDiagResult sd = simultaneous_diagonalize(fam, seed);

    Tensor3 Abar = contract_frame(That, sd.P.transpose());
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i)
        diag[i] = std::abs(Abar(i, i, i));
    std::sort(diag.begin(), diag.end(), std::greater<double>());
    return diag;
}

Eigen::Vector4d integrate_hyperbolic_frames(double c, const Eigen::Vector3d& y_from,
                                            const Eigen::Vector3d& y_to, int steps) {
    if (!(c > 0.0))
        throw InvalidArgument("log cone parameter must be positive");
    if (steps < 1)
        throw InvalidArgument("integrate_hyperbolic_frames needs steps >= 1");
    if (!(y_from(1) > 0.0) || !(y_to(1) > 0.0))
        throw InvalidArgument("hyperbolic frames need y2 > 0 along the segment");

    const Eigen::Vector3d dir = y_to - y_from;
    Eigen::Vector4d vertical(0.0, 0.0, 0.0, 1.0);

    // State: position x and the three partials x_{y_i}, 16 doubles.
    struct HypState {
        Eigen::Vector4d x;
        Eigen::Matrix<double, 4, 3> J;
    };

    HypState s;
    s.x = logcone_param(c, y_from(0), y_from(1), y_from(2));
    s.J.topRows(3) = logcone_param_jacobian(c, y_from(0), y_from(1), y_from(2));
    s.J.row(3) << -1.0 / c, 0.0, 0.0;

    auto deriv = [&](const HypState& st, double t) {
        const Eigen::Vector3d y = y_from + t * dir;
        const double sh = std::sinh(c * y(1));
        const double ch = std::cosh(c * y(1));
        const double coth = ch / sh;
        // second partials x_{y_i y_j} as combinations of the first partials
        Eigen::Vector4d d2[3][3];
        d2[0][0] = c * st.J.col(0) + vertical;
        d2[0][1] = c * st.J.col(1);
        d2[0][2] = c * st.J.col(2);
        d2[1][1] = c * st.J.col(0) + vertical;
        d2[1][2] = c * coth * st.J.col(2);
        d2[2][2] = c * sh * sh * st.J.col(0) - c * sh * ch * st.J.col(1) + sh * sh * vertical;
        d2[1][0] = d2[0][1];
        d2[2][0] = d2[0][2];
        d2[2][1] = d2[1][2];

        HypState ds;
        ds.x = st.J * dir;
        for (int j = 0; j < 3; ++j) {
            Eigen::Vector4d col = Eigen::Vector4d::Zero();
            for (int i = 0; i < 3; ++i)
                col += dir(i) * d2[i][j];
            ds.J.col(j) = col;
        }
        return ds;
    };

    const double h = 1.0 / steps;
    for (int step = 0; step < steps; ++step) {
        const double t = step * h;
        HypState k1 = deriv(s, t);
        HypState s2{s.x + (h / 2.0) * k1.x, s.J + (h / 2.0) * k1.J};
        HypState k2 = deriv(s2, t + h / 2.0);
        HypState s3{s.x + (h / 2.0) * k2.x, s.J + (h / 2.0) * k2.J};
        HypState k3 = deriv(s3, t + h / 2.0);
        HypState s4{s.x + h * k3.x, s.J + h * k3.J};
        HypState k4 = deriv(s4, t + h);
        s.x += (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.J += (h / 6.0) * (k1.J + 2.0 * k2.J + 2.0 * k3.J + k4.J);
    }
    return s.x;
}

} // namespace calabi
