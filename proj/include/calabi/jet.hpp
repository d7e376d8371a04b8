#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "calabi/expr.hpp"

namespace calabi {

constexpr int kMaxJetOrder = 4;
constexpr int kMaxJetDim = 8;

// Enumeration of all multi-indices alpha with |alpha| <= 4 over `dim`
// variables, graded (degree 0 block first), lexicographic within a degree.
// One immutable instance per dimension, cached for the process lifetime.
class JetLayout {
public:
    static const JetLayout& get(int dim);

    int dim() const { return dim_; }
    int count() const { return static_cast<int>(exponents_.size()); }
    int count_up_to(int order) const { return degree_offset_[order + 1]; }
    int degree_begin(int degree) const { return degree_offset_[degree]; }
    int degree_end(int degree) const { return degree_offset_[degree + 1]; }

    const std::array<std::uint8_t, kMaxJetDim>& exponents(int idx) const { return exponents_[idx]; }
    int degree(int idx) const { return degree_[idx]; }
    double factorial(int idx) const { return factorial_[idx]; } // alpha!

    // Index of alpha+beta, or -1 when |alpha+beta| > 4.
    int product_index(int a, int b) const { return product_[a * count() + b]; }

    // Index of the multi-index given by exponent array (length dim), or -1.
    int find(const std::array<std::uint8_t, kMaxJetDim>& e) const;

private:
    explicit JetLayout(int dim);

    int dim_;
    std::vector<std::array<std::uint8_t, kMaxJetDim>> exponents_;
    std::vector<int> degree_;
    std::vector<double> factorial_;
    std::array<int, kMaxJetOrder + 2> degree_offset_{};
    std::vector<int> product_;
    std::unordered_map<std::uint32_t, int> lookup_;
};

// Truncated multivariate Taylor polynomial of total degree <= 4. Coefficients
// are Taylor coefficients (derivative / alpha!). Arithmetic truncates at
// degree 4, which keeps all derivatives up to order 4 exact.
class TaylorPoly {
public:
    TaylorPoly() = default;
    static TaylorPoly constant(const JetLayout& layout, double v);
    static TaylorPoly variable(const JetLayout& layout, int index, double value);

    const JetLayout& layout() const { return *layout_; }
    double value() const { return c_[0]; }
    double coeff(int idx) const { return c_[idx]; }

    TaylorPoly& operator+=(const TaylorPoly& o);
    TaylorPoly& operator-=(const TaylorPoly& o);
    friend TaylorPoly operator+(TaylorPoly a, const TaylorPoly& b) { return a += b; }
    friend TaylorPoly operator-(TaylorPoly a, const TaylorPoly& b) { return a -= b; }
    friend TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b);
    TaylorPoly operator-() const;
    TaylorPoly& operator*=(double s);
    friend TaylorPoly operator*(TaylorPoly a, double s) { return a *= s; }
    friend TaylorPoly operator*(double s, TaylorPoly a) { return a *= s; }

    // Composition with a univariate series sum_k g[k] * (u - u0)^k.
    TaylorPoly compose(const std::array<double, kMaxJetOrder + 1>& g) const;

    friend TaylorPoly exp(const TaylorPoly& u);        // any u0
    friend TaylorPoly ln(const TaylorPoly& u);         // requires u0 > 0
    friend TaylorPoly reciprocal(const TaylorPoly& u); // requires u0 != 0
    friend TaylorPoly pow_int(const TaylorPoly& u, int p);

private:
    TaylorPoly(const JetLayout& layout, double v);

    const JetLayout* layout_ = nullptr;
    std::vector<double> c_;
};

// Value and all partial derivatives of f up to `order` (<= 4) at a point.
// Partials are stored once per multi-index; accessor indices may be given in
// any order.
class Jet4 {
public:
    Jet4(int dim, int order, std::vector<double> point, std::vector<double> partials);

    int dim() const { return dim_; }
    int order() const { return order_; }
    const std::vector<double>& point() const { return point_; }

    double value() const { return partials_[0]; }
    double d1(int i) const;
    double d2(int i, int j) const;
    double d3(int i, int j, int k) const;
    double d4(int i, int j, int k, int l) const;

private:
    double fetch(std::array<std::uint8_t, kMaxJetDim> e, int degree) const;

    int dim_;
    int order_;
    std::vector<double> point_;
    std::vector<double> partials_; // layout order, truncated at `order`
    const JetLayout* layout_;
};

// Evaluates f and its exact partial derivatives up to `order` at x by
// propagating truncated Taylor arithmetic through the expression tree.
Jet4 eval_jet(const FunctionSpec& f, const std::vector<double>& x, int order = kMaxJetOrder);

} // namespace calabi
