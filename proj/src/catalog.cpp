#include "calabi/catalog.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace calabi {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + (hi - lo) * u;
}

std::string format_param(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

double parse_positive(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("invalid " + what + " '" + s + "'");
    }
    if (used != s.size())
        throw InvalidArgument("invalid " + what + " '" + s + "'");
    if (!(v > 0.0))
        throw InvalidArgument(what + " must be positive, got '" + s + "'");
    return v;
}

int parse_dim(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("invalid dimension '" + s + "'");
    }
    if (used != s.size())
        throw InvalidArgument("invalid dimension '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

} // namespace

CatalogSurface::CatalogSurface(SurfaceKind kind, int dim, std::vector<double> c)
    : kind_(kind), dim_(dim), c_(std::move(c)) {}

CatalogSurface CatalogSurface::paraboloid(int n) {
    if (n < 2)
        throw InvalidArgument("paraboloid needs n >= 2");
    return CatalogSurface(SurfaceKind::Paraboloid, n, {});
}

CatalogSurface CatalogSurface::q(std::vector<double> c, int n) {
    if (n < 2)
        throw InvalidArgument("Q needs n >= 2");
    const int r = static_cast<int>(c.size());
    if (r < 1 || r > n)
        throw InvalidArgument("Q needs 1 <= r <= n log parameters");
    for (double ci : c)
        if (!(ci > 0.0))
            throw InvalidArgument("Q parameters must be positive");
    return CatalogSurface(SurfaceKind::Q, n, std::move(c));
}

CatalogSurface CatalogSurface::log_cone(double c) {
    if (!(c > 0.0))
        throw InvalidArgument("log cone parameter must be positive");
    return CatalogSurface(SurfaceKind::LogCone, 3, {c});
}

CatalogSurface CatalogSurface::parse(const std::string& id) {
    std::vector<std::string> parts = split(id, ':');
    if (parts.empty())
        throw InvalidArgument("empty catalog id");
    const std::string& head = parts[0];
    if (head == "paraboloid") {
        if (parts.size() != 2)
            throw InvalidArgument("expected paraboloid:n");
        return paraboloid(parse_dim(parts[1]));
    }
    if (head == "q") {
        if (parts.size() != 3)
            throw InvalidArgument("expected q:c1,...,cr:n");
        std::vector<double> c;
        for (const std::string& s : split(parts[1], ','))
            c.push_back(parse_positive(s, "Q parameter"));
        return q(std::move(c), parse_dim(parts[2]));
    }
    if (head == "logcone") {
        if (parts.size() != 2)
            throw InvalidArgument("expected logcone:c");
        return log_cone(parse_positive(parts[1], "log cone parameter"));
    }
    throw InvalidArgument("unknown catalog id '" + id + "'");
}

std::string CatalogSurface::id() const {
    switch (kind_) {
    case SurfaceKind::Paraboloid:
        return "paraboloid:" + std::to_string(dim_);
    case SurfaceKind::Q: {
        std::string s = "q:";
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i)
                s += ',';
            s += format_param(c_[i]);
        }
        return s + ":" + std::to_string(dim_);
    }
    case SurfaceKind::LogCone:
        return "logcone:" + format_param(c_[0]);
    }
    return "?";
}

bool CatalogSurface::in_domain(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        return false;
    switch (kind_) {
    case SurfaceKind::Paraboloid:
        return true;
    case SurfaceKind::Q:
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!(x[i] > 0.0))
                return false;
        return true;
    case SurfaceKind::LogCone:
        return x[0] > 0.0 && x[0] * x[0] - x[1] * x[1] - x[2] * x[2] > 0.0;
    }
    return false;
}

FunctionSpec CatalogSurface::as_function() const {
    switch (kind_) {
    case SurfaceKind::Paraboloid: {
        NodePtr sum;
        for (int j = 0; j < dim_; ++j) {
            NodePtr term = make_mul(make_constant(0.5), make_pow(make_variable(j), 2));
            sum = sum ? make_add(sum, term) : term;
        }
        return FunctionSpec{sum, dim_};
    }
    case SurfaceKind::Q: {
        const int r = static_cast<int>(c_.size());
        NodePtr sum;
        for (int i = 0; i < r; ++i) {
            NodePtr term = make_neg(make_mul(make_constant(c_[i]), make_ln(make_variable(i))));
            sum = sum ? make_add(sum, term) : term;
        }
        for (int j = r; j < dim_; ++j) {
            NodePtr term = make_mul(make_constant(0.5), make_pow(make_variable(j), 2));
            sum = make_add(sum, term);
        }
        return FunctionSpec{sum, dim_};
    }
    case SurfaceKind::LogCone: {
        const double c = c_[0];
        NodePtr arg = make_sub(make_sub(make_pow(make_variable(0), 2), make_pow(make_variable(1), 2)),
                               make_pow(make_variable(2), 2));
        NodePtr f = make_neg(make_mul(make_constant(1.0 / (2.0 * c * c)), make_ln(arg)));
        return FunctionSpec{f, 3};
    }
    }
    throw Error("corrupt catalog surface");
}

ExpectedInvariants CatalogSurface::expected_invariants() const {
    ExpectedInvariants e;
    switch (kind_) {
    case SurfaceKind::Paraboloid:
        e.is_flat = true;
        e.is_parallel = true;
        e.case_index = 0;
        return e;
    case SurfaceKind::Q: {
        double inv_sum = 0.0;
        double cmin = c_[0];
        for (double ci : c_) {
            inv_sum += 1.0 / ci;
            cmin = std::min(cmin, ci);
        }
        e.is_flat = true;
        e.is_parallel = true;
        e.pick_J = inv_sum / (dim_ * (dim_ - 1));
        e.scalar_R = 0.0;
        e.tcheb_norm2 = inv_sum / (double(dim_) * dim_);
        e.case_index = 1;
        e.mu1 = 1.0 / std::sqrt(cmin);
        return e;
    }
    case SurfaceKind::LogCone: {
        const double c = c_[0];
        e.is_flat = false;
        e.is_parallel = true;
        e.pick_J = 7.0 * c * c / 6.0;
        e.scalar_R = -2.0 * c * c;
        e.tcheb_norm2 = c * c;
        e.case_index = 2;
        e.mu1 = std::sqrt(2.0) * c;
        return e;
    }
    }
    throw Error("corrupt catalog surface");
}

std::vector<std::vector<double>> CatalogSurface::sample_points(int count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    const int r = static_cast<int>(c_.size());
    for (int p = 0; p < count; ++p) {
        std::vector<double> x(dim_);
        switch (kind_) {
        case SurfaceKind::Paraboloid:
            for (int i = 0; i < dim_; ++i)
                x[i] = uniform(rng, -2.0, 2.0);
            break;
        case SurfaceKind::Q:
            for (int i = 0; i < dim_; ++i)
                x[i] = i < r ? uniform(rng, 0.3, 3.0) : uniform(rng, -2.0, 2.0);
            break;
        case SurfaceKind::LogCone: {
            // x1^2 - x2^2 - x3^2 = s^2 with rho/s bounded: fourth-order
            // contractions lose ~ (1 + 2 rho^2/s^2)^6 digits toward the
            // boundary cone, so the sampler stays at bounded hyperbolic
            // distance from the axis
            const double s = uniform(rng, 0.8, 2.2);
            const double rho = uniform(rng, 0.0, 1.2) * s;
            const double theta = uniform(rng, 0.0, 6.283185307179586);
            x[1] = rho * std::cos(theta);
            x[2] = rho * std::sin(theta);
            x[0] = std::sqrt(rho * rho + s * s);
            break;
        }
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

Eigen::Vector4d logcone_param(double c, double y1, double y2, double y3) {
    if (!(c > 0.0))
        throw InvalidArgument("log cone parameter must be positive");
    if (!(y2 > 0.0))
        throw InvalidArgument("logcone_param needs y2 > 0");
    const double e = std::exp(c * y1);
    Eigen::Vector4d x;
    x(0) = std::cosh(c * y2) * e;
    x(1) = std::cos(c * y3) * std::sinh(c * y2) * e;
    x(2) = std::sin(c * y3) * std::sinh(c * y2) * e;
    x(3) = -y1 / c;
    return x;
}

Eigen::Matrix3d logcone_param_jacobian(double c, double y1, double y2, double y3) {
    const double e = std::exp(c * y1);
    const double ch = std::cosh(c * y2);
    const double sh = std::sinh(c * y2);
    const double cs = std::cos(c * y3);
    const double sn = std::sin(c * y3);
    Eigen::Matrix3d J;
    J(0, 0) = c * ch * e;
    J(0, 1) = c * sh * e;
    J(0, 2) = 0.0;
    J(1, 0) = c * cs * sh * e;
    J(1, 1) = c * cs * ch * e;
    J(1, 2) = -c * sn * sh * e;
    J(2, 0) = c * sn * sh * e;
    J(2, 1) = c * sn * ch * e;
    J(2, 2) = c * cs * sh * e;
    return J;
}

} // namespace calabi
