#include "calabi/affine.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "calabi/tensor.hpp"

namespace calabi {

void AffineMap::validate() const {
    const int n = dim();
    if (n < 1 || linear.cols() != n || shear.size() != n || translate.size() != n + 1)
        throw InvalidArgument("affine map blocks have inconsistent sizes");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(linear);
    if (!lu.isInvertible())
        throw InvalidArgument("affine map has a singular linear block");
}

AffineMap AffineMap::identity(int n) {
    AffineMap m;
    m.linear = Eigen::MatrixXd::Identity(n, n);
    m.shear = Eigen::VectorXd::Zero(n);
    m.translate = Eigen::VectorXd::Zero(n + 1);
    return m;
}

AffineMap AffineMap::random(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
    };
    auto random_orthogonal = [&] {
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g(i, j) = uniform(-1.0, 1.0);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        return q;
    };
    Eigen::VectorXd sv(n);
    for (int i = 0; i < n; ++i)
        sv(i) = uniform(0.6, 1.6);
    AffineMap m;
    m.linear = random_orthogonal() * sv.asDiagonal() * random_orthogonal().transpose();
    m.shear.resize(n);
    for (int i = 0; i < n; ++i)
        m.shear(i) = uniform(-1.0, 1.0);
    m.translate.resize(n + 1);
    for (int i = 0; i <= n; ++i)
        m.translate(i) = uniform(-1.0, 1.0);
    return m;
}

Eigen::VectorXd AffineMap::apply_base(const Eigen::VectorXd& x) const {
    return linear * x + translate.head(dim());
}

Eigen::VectorXd AffineMap::apply(const Eigen::VectorXd& X) const {
    const int n = dim();
    Eigen::VectorXd y(n + 1);
    y.head(n) = linear * X.head(n) + translate.head(n);
    y(n) = shear.dot(X.head(n)) + X(n) + translate(n);
    return y;
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
    const int n = dim();
    if (inner.dim() != n)
        throw InvalidArgument("cannot compose affine maps of different dimensions");
    AffineMap m;
    m.linear = linear * inner.linear;
    m.shear = inner.linear.transpose() * shear + inner.shear;
    m.translate.resize(n + 1);
    m.translate.head(n) = linear * inner.translate.head(n) + translate.head(n);
    m.translate(n) = shear.dot(inner.translate.head(n)) + inner.translate(n) + translate(n);
    return m;
}

AffineMap AffineMap::inverse() const {
    validate();
    const int n = dim();
    AffineMap m;
    m.linear = linear.inverse();
    m.shear = -m.linear.transpose() * shear;
    m.translate.resize(n + 1);
    m.translate.head(n) = -m.linear * translate.head(n);
    m.translate(n) = -translate(n) + shear.dot(m.linear * translate.head(n));
    return m;
}

nlohmann::json AffineMap::to_json() const {
    const int n = dim();
    nlohmann::json j;
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < n; ++k)
            row.push_back(linear(i, k));
        j["linear"].push_back(row);
    }
    for (int i = 0; i < n; ++i)
        j["shear"].push_back(shear(i));
    for (int i = 0; i <= n; ++i)
        j["translate"].push_back(translate(i));
    return j;
}

AffineMap AffineMap::from_json(const nlohmann::json& j) {
    if (!j.contains("linear") || !j.contains("shear") || !j.contains("translate"))
        throw InvalidArgument("affine map JSON needs linear, shear, translate");
    const auto& lin = j.at("linear");
    const int n = static_cast<int>(lin.size());
    AffineMap m;
    m.linear.resize(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(lin.at(i).size()) != n)
            throw InvalidArgument("affine map linear block must be square");
        for (int k = 0; k < n; ++k)
            m.linear(i, k) = lin.at(i).at(k).get<double>();
    }
    if (static_cast<int>(j.at("shear").size()) != n ||
        static_cast<int>(j.at("translate").size()) != n + 1)
        throw InvalidArgument("affine map blocks have inconsistent sizes");
    m.shear.resize(n);
    for (int i = 0; i < n; ++i)
        m.shear(i) = j.at("shear").at(i).get<double>();
    m.translate.resize(n + 1);
    for (int i = 0; i <= n; ++i)
        m.translate(i) = j.at("translate").at(i).get<double>();
    m.validate();
    return m;
}

TransformedFunction act_on_function(const AffineMap& phi, const FunctionSpec& f) {
    phi.validate();
    const int n = f.dim;
    if (phi.dim() != n)
        throw InvalidArgument("affine map dimension does not match the function");

    // g(x) = f(x) + shear.x + b_last in the original coordinates, then
    // substitute x = linear^{-1} (y - b_base).
    NodePtr g = f.root;
    for (int j = 0; j < n; ++j)
        if (phi.shear(j) != 0.0)
            g = make_add(g, make_mul(make_constant(phi.shear(j)), make_variable(j)));
    if (phi.translate(n) != 0.0)
        g = make_add(g, make_constant(phi.translate(n)));

    Eigen::MatrixXd inv = phi.linear.inverse();
    Eigen::VectorXd offset = -inv * phi.translate.head(n);
    NodePtr composed = make_affine_compose(g, inv, offset);
    return TransformedFunction{FunctionSpec{composed, n}, phi};
}

EquivalenceReport check_equivalence_invariants(const AffineMap& phi, const FunctionSpec& f,
                                               const std::vector<std::vector<double>>& points,
                                               const NormalFormOptions& opts) {
    phi.validate();
    const int n = f.dim;
    TransformedFunction tf = act_on_function(phi, f);
    Eigen::MatrixXd inv = phi.linear.inverse();

    EquivalenceReport rep;
    for (const auto& xv : points) {
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), n);
        Eigen::VectorXd y = phi.apply_base(x);
        std::vector<double> yv(y.data(), y.data() + n);

        TensorBundle bx = bundle_at(eval_jet(f, xv, 4));
        TensorBundle by = bundle_at(eval_jet(tf.func, yv, 4));

        Eigen::MatrixXd g_pulled = inv.transpose() * bx.metric.G * inv;
        rep.metric_dev = std::max(rep.metric_dev,
                                  ((by.metric.G - g_pulled).cwiseAbs().maxCoeff()));

        Tensor3 a_pulled = contract_frame(bx.cubic.A, inv);
        double cdev = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    cdev = std::max(cdev, std::abs(by.cubic.A(i, j, k) - a_pulled(i, j, k)));
        rep.cubic_dev = std::max(rep.cubic_dev, cdev);

        rep.pick_dev = std::max(rep.pick_dev, std::abs(by.curv.pick_J - bx.curv.pick_J));
        rep.scalar_dev = std::max(rep.scalar_dev,
                                  std::abs(by.curv.scalar_trace - bx.curv.scalar_trace));
        rep.tcheb_dev = std::max(rep.tcheb_dev,
                                 std::abs(by.curv.tcheb_norm2 - bx.curv.tcheb_norm2));

        MaximizeResult mx = maximize_cubic(bx, opts);
        MaximizeResult my = maximize_cubic(by, opts);
        Eigen::VectorXd sx = build_basis(bx, mx.direction, opts).spectrum;
        Eigen::VectorXd sy = build_basis(by, my.direction, opts).spectrum;
        rep.spectrum_dev = std::max(rep.spectrum_dev, (sx - sy).cwiseAbs().maxCoeff());
        ++rep.points_checked;
    }
    return rep;
}

} // namespace calabi
