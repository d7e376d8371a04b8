#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "calabi/expr.hpp"
#include "calabi/normal_form.hpp"

namespace calabi {

// An element of the affine group fixing the vertical direction (0,..,0,1):
//   (x, h) -> (linear x + translate_base, shear.x + h + translate_last).
struct AffineMap {
    Eigen::MatrixXd linear;    // n x n, invertible
    Eigen::VectorXd shear;     // n
    Eigen::VectorXd translate; // n + 1

    int dim() const { return static_cast<int>(linear.rows()); }
    void validate() const; // throws InvalidArgument on shape/singularity

    static AffineMap identity(int n);
    // Well-conditioned random element (singular values in [0.6, 1.6]).
    static AffineMap random(int n, std::uint64_t seed);

    Eigen::VectorXd apply_base(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& X) const; // on R^{n+1}
    AffineMap compose(const AffineMap& inner) const;       // this after inner
    AffineMap inverse() const;

    nlohmann::json to_json() const;
    static AffineMap from_json(const nlohmann::json& j);
};

// The transformed function ft with ft(linear x + b) = f(x) + shear.x + b_last,
// together with the base-point map carrying old points to new ones.
struct TransformedFunction {
    FunctionSpec func;
    AffineMap map;
};

TransformedFunction act_on_function(const AffineMap& phi, const FunctionSpec& f);

// Maximal deviations of the pulled-back tensors and scalar invariants over
// the sample points; all entries are absolute.
struct EquivalenceReport {
    double metric_dev = 0.0;   // Gt(y) vs conjugated G(x)
    double cubic_dev = 0.0;    // At(y) vs conjugated A(x)
    double pick_dev = 0.0;     // |Jt - J|
    double scalar_dev = 0.0;   // |Rt - R|
    double tcheb_dev = 0.0;    // ||Tt|^2 - |T|^2|
    double spectrum_dev = 0.0; // max_i |mu_i(t) - mu_i|
    int points_checked = 0;
};

EquivalenceReport check_equivalence_invariants(const AffineMap& phi, const FunctionSpec& f,
                                               const std::vector<std::vector<double>>& points,
                                               const NormalFormOptions& opts = {});

} // namespace calabi
