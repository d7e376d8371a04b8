#pragma once

// Test-only oracles and generators. The finite-difference code here is the
// independent check against the jet implementation and must not share any
// arithmetic with it.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "calabi/expr.hpp"
#include "calabi/jet.hpp"

namespace calabi_test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
}

// Nested central differences for the mixed partial along `idx` of a scalar
// field, Richardson-extrapolated once against the doubled step:
// (4 D(h) - D(2h)) / 3. Extrapolating toward the coarser step keeps the
// rounding noise at the level of D(h) while cancelling the h^2 term.
inline double fd_partial(const std::function<double(const std::vector<double>&)>& field,
                         const std::vector<double>& x, const std::vector<int>& idx, double h) {
    std::function<double(const std::vector<double>&, std::size_t, double)> diff =
        [&](const std::vector<double>& p, std::size_t level, double step) -> double {
        if (level == idx.size())
            return field(p);
        std::vector<double> hi = p, lo = p;
        hi[idx[level]] += step;
        lo[idx[level]] -= step;
        return (diff(hi, level + 1, step) - diff(lo, level + 1, step)) / (2.0 * step);
    };
    const double base = diff(x, 0, h);
    const double coarse = diff(x, 0, 2.0 * h);
    return (4.0 * base - coarse) / 3.0;
}

inline double fd_partial(const calabi::FunctionSpec& f, const std::vector<double>& x,
                         const std::vector<int>& idx, double h) {
    return fd_partial([&f](const std::vector<double>& p) { return calabi::eval_value(f, p); }, x,
                      idx, h);
}

// Random polynomial: a sum of monomials with per-variable exponent <= 2 and
// O(1) coefficients. Total degree stays below 8, so one Richardson step
// removes the truncation error of every nested difference completely and the
// comparison is limited by rounding only.
inline calabi::FunctionSpec random_polynomial(int dim, std::mt19937_64& rng) {
    using namespace calabi;
    const int terms = 3 + static_cast<int>(rng() % 4);
    NodePtr sum;
    for (int t = 0; t < terms; ++t) {
        NodePtr mono = make_constant(uniform(rng, -1.0, 1.0));
        for (int i = 0; i < dim; ++i) {
            const int e = static_cast<int>(rng() % 3);
            if (e > 0)
                mono = make_mul(mono, make_pow(make_variable(i), e));
        }
        sum = sum ? make_add(sum, mono) : mono;
    }
    // every variable must appear so the inferred dimension is right
    for (int i = 0; i < dim; ++i)
        sum = make_add(sum, make_mul(make_constant(0.125), make_pow(make_variable(i), 2)));
    return FunctionSpec{sum, dim};
}

// Strictly convex quartic-plus-log function on [0.5, 2]^n: the diagonal
// Hessian terms dominate the bounded cross couplings.
inline calabi::FunctionSpec random_quartic_log(int dim, std::mt19937_64& rng) {
    using namespace calabi;
    NodePtr sum;
    auto add = [&sum](NodePtr term) { sum = sum ? make_add(sum, term) : term; };
    for (int i = 0; i < dim; ++i) {
        add(make_mul(make_constant(uniform(rng, 0.1, 0.6)), make_pow(make_variable(i), 4)));
        add(make_mul(make_constant(uniform(rng, 0.4, 0.75)), make_pow(make_variable(i), 2)));
        add(make_neg(make_mul(make_constant(uniform(rng, 0.3, 1.5)), make_ln(make_variable(i)))));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            add(make_mul(make_constant(uniform(rng, -0.15, 0.15)),
                         make_mul(make_variable(i), make_variable(j))));
    return FunctionSpec{sum, dim};
}

inline std::vector<double> random_quartic_log_point(int dim, std::mt19937_64& rng) {
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i)
        x[i] = uniform(rng, 0.6, 1.8);
    return x;
}

} // namespace calabi_test
