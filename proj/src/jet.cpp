#include "calabi/jet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace calabi {

namespace {

std::uint32_t pack_exponents(const std::array<std::uint8_t, kMaxJetDim>& e, int dim) {
    std::uint32_t key = 0;
    for (int i = 0; i < dim; ++i)
        key |= static_cast<std::uint32_t>(e[i] & 0x7u) << (3 * i);
    return key;
}

} // namespace

JetLayout::JetLayout(int dim) : dim_(dim) {
    // Enumerate multi-indices degree by degree, lexicographically within one.
    std::array<std::uint8_t, kMaxJetDim> e{};
    for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
        degree_offset_[deg] = static_cast<int>(exponents_.size());
        auto emit = [&](const std::vector<int>& exps) {
            e.fill(0);
            double fact = 1.0;
            for (int i = 0; i < dim; ++i) {
                e[i] = static_cast<std::uint8_t>(exps[i]);
                for (int k = 2; k <= exps[i]; ++k)
                    fact *= k;
            }
            lookup_.emplace(pack_exponents(e, dim), static_cast<int>(exponents_.size()));
            exponents_.push_back(e);
            degree_.push_back(deg);
            factorial_.push_back(fact);
        };
        // Compositions of deg into dim parts, lexicographically descending.
        std::vector<int> exps(dim, 0);
        exps[0] = deg;
        for (;;) {
            emit(exps);
            int i = dim - 2;
            while (i >= 0 && exps[i] == 0)
                --i;
            if (i < 0)
                break;
            exps[i] -= 1;
            int rest = deg;
            for (int k = 0; k <= i; ++k)
                rest -= exps[k];
            exps[i + 1] = rest;
            for (int k = i + 2; k < dim; ++k)
                exps[k] = 0;
        }
    }
    degree_offset_[kMaxJetOrder + 1] = static_cast<int>(exponents_.size());

    const int n = count();
    product_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (degree_[a] + degree_[b] > kMaxJetOrder)
                continue;
            std::array<std::uint8_t, kMaxJetDim> s{};
            for (int i = 0; i < dim_; ++i)
                s[i] = static_cast<std::uint8_t>(exponents_[a][i] + exponents_[b][i]);
            product_[static_cast<std::size_t>(a) * n + b] = find(s);
        }
    }
}

int JetLayout::find(const std::array<std::uint8_t, kMaxJetDim>& e) const {
    auto it = lookup_.find(pack_exponents(e, dim_));
    return it == lookup_.end() ? -1 : it->second;
}

const JetLayout& JetLayout::get(int dim) {
    if (dim < 1 || dim > kMaxJetDim)
        throw InvalidArgument("jet dimension must be in 1.." + std::to_string(kMaxJetDim));
    static std::mutex mutex;
    static std::array<std::unique_ptr<JetLayout>, kMaxJetDim + 1> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (!cache[dim])
        cache[dim].reset(new JetLayout(dim));
    return *cache[dim];
}

TaylorPoly::TaylorPoly(const JetLayout& layout, double v)
    : layout_(&layout), c_(layout.count(), 0.0) {
    c_[0] = v;
}

TaylorPoly TaylorPoly::constant(const JetLayout& layout, double v) {
    return TaylorPoly(layout, v);
}

TaylorPoly TaylorPoly::variable(const JetLayout& layout, int index, double value) {
    if (index < 0 || index >= layout.dim())
        throw InvalidArgument("variable index out of range");
    TaylorPoly p(layout, value);
    std::array<std::uint8_t, kMaxJetDim> e{};
    e[index] = 1;
    p.c_[layout.find(e)] = 1.0;
    return p;
}

TaylorPoly& TaylorPoly::operator+=(const TaylorPoly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        c_[i] += o.c_[i];
    return *this;
}

TaylorPoly& TaylorPoly::operator-=(const TaylorPoly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        c_[i] -= o.c_[i];
    return *this;
}

TaylorPoly TaylorPoly::operator-() const {
    TaylorPoly r = *this;
    for (double& v : r.c_)
        v = -v;
    return r;
}

TaylorPoly& TaylorPoly::operator*=(double s) {
    for (double& v : c_)
        v *= s;
    return *this;
}

TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b) {
    const JetLayout& L = *a.layout_;
    const int n = L.count();
    TaylorPoly r(L, 0.0);
    for (int i = 0; i < n; ++i) {
        const double ai = a.c_[i];
        if (ai == 0.0)
            continue;
        for (int j = 0; j < n; ++j) {
            const int t = L.product_index(i, j);
            if (t >= 0)
                r.c_[t] += ai * b.c_[j];
        }
    }
    return r;
}

TaylorPoly TaylorPoly::compose(const std::array<double, kMaxJetOrder + 1>& g) const {
    const JetLayout& L = *layout_;
    TaylorPoly w = *this;
    w.c_[0] = 0.0; // w = u - u0
    TaylorPoly r = TaylorPoly::constant(L, g[0]);
    TaylorPoly wk = w;
    for (int k = 1; k <= kMaxJetOrder; ++k) {
        TaylorPoly term = wk;
        term *= g[k];
        r += term;
        if (k < kMaxJetOrder)
            wk = wk * w;
    }
    return r;
}

TaylorPoly exp(const TaylorPoly& u) {
    const double e0 = std::exp(u.value());
    return u.compose({e0, e0, e0 / 2.0, e0 / 6.0, e0 / 24.0});
}

TaylorPoly ln(const TaylorPoly& u) {
    const double u0 = u.value();
    // g_k = (-1)^(k-1) / (k * u0^k)
    const double i1 = 1.0 / u0;
    const double i2 = i1 * i1;
    return u.compose({std::log(u0), i1, -i2 / 2.0, i2 * i1 / 3.0, -i2 * i2 / 4.0});
}

TaylorPoly reciprocal(const TaylorPoly& u) {
    const double u0 = u.value();
    // g_k = (-1)^k / u0^(k+1)
    const double i1 = 1.0 / u0;
    const double i2 = i1 * i1;
    const double i3 = i2 * i1;
    return u.compose({i1, -i2, i3, -i2 * i2, i2 * i3});
}

TaylorPoly pow_int(const TaylorPoly& u, int p) {
    if (p < 0)
        return reciprocal(pow_int(u, -p));
    TaylorPoly r = TaylorPoly::constant(u.layout(), 1.0);
    TaylorPoly base = u;
    int e = p;
    while (e > 0) {
        if (e & 1)
            r = r * base;
        e >>= 1;
        if (e > 0)
            base = base * base;
    }
    return r;
}

Jet4::Jet4(int dim, int order, std::vector<double> point, std::vector<double> partials)
    : dim_(dim), order_(order), point_(std::move(point)), partials_(std::move(partials)),
      layout_(&JetLayout::get(dim)) {
    if (order < 0 || order > kMaxJetOrder)
        throw InvalidArgument("jet order must be in 0..4");
    if (static_cast<int>(partials_.size()) != layout_->count_up_to(order))
        throw InvalidArgument("jet storage does not match dimension and order");
}

double Jet4::fetch(std::array<std::uint8_t, kMaxJetDim> e, int degree) const {
    if (degree > order_)
        throw InvalidArgument("jet has order " + std::to_string(order_) +
                              "; derivative of order " + std::to_string(degree) + " requested");
    const int idx = layout_->find(e);
    if (idx < 0)
        throw InvalidArgument("derivative index out of range");
    return partials_[idx];
}

namespace {

void bump(std::array<std::uint8_t, kMaxJetDim>& e, int i, int dim) {
    if (i < 0 || i >= dim)
        throw InvalidArgument("derivative index out of range");
    e[i] += 1;
}

} // namespace

double Jet4::d1(int i) const {
    std::array<std::uint8_t, kMaxJetDim> e{};
    bump(e, i, dim_);
    return fetch(e, 1);
}

double Jet4::d2(int i, int j) const {
    std::array<std::uint8_t, kMaxJetDim> e{};
    bump(e, i, dim_);
    bump(e, j, dim_);
    return fetch(e, 2);
}

double Jet4::d3(int i, int j, int k) const {
    std::array<std::uint8_t, kMaxJetDim> e{};
    bump(e, i, dim_);
    bump(e, j, dim_);
    bump(e, k, dim_);
    return fetch(e, 3);
}

double Jet4::d4(int i, int j, int k, int l) const {
    std::array<std::uint8_t, kMaxJetDim> e{};
    bump(e, i, dim_);
    bump(e, j, dim_);
    bump(e, k, dim_);
    bump(e, l, dim_);
    return fetch(e, 4);
}

namespace {

struct ValueEvaluator {
    const std::vector<double>& vars;

    double eval(const Node& n) const {
        switch (n.kind) {
        case NodeKind::Constant:
            return n.value;
        case NodeKind::Variable:
            if (n.index >= static_cast<int>(vars.size()))
                throw InvalidArgument("variable x" + std::to_string(n.index + 1) +
                                      " exceeds the function dimension");
            return vars[n.index];
        case NodeKind::Add:
            return eval(*n.lhs) + eval(*n.rhs);
        case NodeKind::Sub:
            return eval(*n.lhs) - eval(*n.rhs);
        case NodeKind::Mul:
            return eval(*n.lhs) * eval(*n.rhs);
        case NodeKind::Div: {
            double denom = eval(*n.rhs);
            if (denom == 0.0)
                throw DomainError("division by zero", to_string(*n.rhs));
            return eval(*n.lhs) / denom;
        }
        case NodeKind::Pow: {
            double b = eval(*n.lhs);
            if (n.exponent < 0 && b == 0.0)
                throw DomainError("zero raised to a negative power", to_string(*n.lhs));
            return std::pow(b, n.exponent);
        }
        case NodeKind::Neg:
            return -eval(*n.lhs);
        case NodeKind::Ln: {
            double a = eval(*n.lhs);
            if (!(a > 0.0))
                throw DomainError("ln of non-positive value", to_string(*n.lhs));
            return std::log(a);
        }
        case NodeKind::Exp:
            return std::exp(eval(*n.lhs));
        case NodeKind::AffineCompose: {
            const int inner_dim = static_cast<int>(n.matrix.rows());
            std::vector<double> inner(inner_dim);
            for (int i = 0; i < inner_dim; ++i) {
                double acc = n.offset(i);
                for (int j = 0; j < static_cast<int>(n.matrix.cols()); ++j)
                    acc += n.matrix(i, j) * vars[j];
                inner[i] = acc;
            }
            ValueEvaluator sub{inner};
            return sub.eval(*n.lhs);
        }
        }
        throw Error("corrupt expression node");
    }
};

struct JetEvaluator {
    const std::vector<TaylorPoly>& vars;
    const JetLayout& layout;

    TaylorPoly eval(const Node& n) const {
        switch (n.kind) {
        case NodeKind::Constant:
            return TaylorPoly::constant(layout, n.value);
        case NodeKind::Variable:
            if (n.index >= static_cast<int>(vars.size()))
                throw InvalidArgument("variable x" + std::to_string(n.index + 1) +
                                      " exceeds the function dimension");
            return vars[n.index];
        case NodeKind::Add:
            return eval(*n.lhs) + eval(*n.rhs);
        case NodeKind::Sub:
            return eval(*n.lhs) - eval(*n.rhs);
        case NodeKind::Mul:
            return eval(*n.lhs) * eval(*n.rhs);
        case NodeKind::Div: {
            TaylorPoly denom = eval(*n.rhs);
            if (denom.value() == 0.0)
                throw DomainError("division by zero", to_string(*n.rhs));
            return eval(*n.lhs) * reciprocal(denom);
        }
        case NodeKind::Pow: {
            TaylorPoly b = eval(*n.lhs);
            if (n.exponent < 0 && b.value() == 0.0)
                throw DomainError("zero raised to a negative power", to_string(*n.lhs));
            return pow_int(b, n.exponent);
        }
        case NodeKind::Neg:
            return -eval(*n.lhs);
        case NodeKind::Ln: {
            TaylorPoly a = eval(*n.lhs);
            if (!(a.value() > 0.0))
                throw DomainError("ln of non-positive value", to_string(*n.lhs));
            return ln(a);
        }
        case NodeKind::Exp:
            return exp(eval(*n.lhs));
        case NodeKind::AffineCompose: {
            const int inner_dim = static_cast<int>(n.matrix.rows());
            std::vector<TaylorPoly> inner;
            inner.reserve(inner_dim);
            for (int i = 0; i < inner_dim; ++i) {
                TaylorPoly acc = TaylorPoly::constant(layout, n.offset(i));
                for (int j = 0; j < static_cast<int>(n.matrix.cols()); ++j) {
                    if (n.matrix(i, j) != 0.0)
                        acc += vars[j] * n.matrix(i, j);
                }
                inner.push_back(acc);
            }
            JetEvaluator sub{inner, layout};
            return sub.eval(*n.lhs);
        }
        }
        throw Error("corrupt expression node");
    }
};

} // namespace

double eval_value(const FunctionSpec& f, const std::vector<double>& x) {
    if (!f.root)
        throw InvalidArgument("empty function");
    if (static_cast<int>(x.size()) != f.dim)
        throw InvalidArgument("point dimension does not match function dimension");
    ValueEvaluator ev{x};
    return ev.eval(*f.root);
}

Jet4 eval_jet(const FunctionSpec& f, const std::vector<double>& x, int order) {
    if (!f.root)
        throw InvalidArgument("empty function");
    if (static_cast<int>(x.size()) != f.dim)
        throw InvalidArgument("point dimension does not match function dimension");
    if (order < 0 || order > kMaxJetOrder)
        throw InvalidArgument("jet order must be in 0..4");
    const JetLayout& layout = JetLayout::get(f.dim);
    std::vector<TaylorPoly> vars;
    vars.reserve(f.dim);
    for (int i = 0; i < f.dim; ++i)
        vars.push_back(TaylorPoly::variable(layout, i, x[i]));
    JetEvaluator ev{vars, layout};
    TaylorPoly r = ev.eval(*f.root);

    std::vector<double> partials(layout.count_up_to(order));
    for (int idx = 0; idx < layout.count_up_to(order); ++idx)
        partials[idx] = r.coeff(idx) * layout.factorial(idx);
    return Jet4(f.dim, order, x, std::move(partials));
}

} // namespace calabi
