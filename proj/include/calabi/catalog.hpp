#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "calabi/expr.hpp"

namespace calabi {

enum class SurfaceKind { Paraboloid, Q, LogCone };

// Closed-form expectations for a catalog member; every scalar is constant
// over the surface.
struct ExpectedInvariants {
    bool is_flat = false;
    bool is_parallel = false;
    double pick_J = 0.0;
    double scalar_R = 0.0;
    double tcheb_norm2 = 0.0;
    int case_index = 0;
    double mu1 = 0.0;
};

// The classified hypersurfaces: the elliptic paraboloid, the flat-parallel
// family Q(c_1..c_r; n), and the one non-flat parallel hypersurface in n = 3
// (graph of -ln(x1^2 - x2^2 - x3^2) / (2 c^2), "log cone" below).
class CatalogSurface {
public:
    static CatalogSurface paraboloid(int n);
    static CatalogSurface q(std::vector<double> c, int n);
    static CatalogSurface log_cone(double c);

    // Ids: "paraboloid:n", "q:c1,...,cr:n", "logcone:c".
    static CatalogSurface parse(const std::string& id);
    std::string id() const;

    SurfaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<double>& params() const { return c_; }

    bool in_domain(const std::vector<double>& x) const;
    FunctionSpec as_function() const;
    ExpectedInvariants expected_invariants() const;

    // Seeded domain samples, kept away from domain boundaries so the Hessian
    // stays well conditioned.
    std::vector<std::vector<double>> sample_points(int count, std::uint64_t seed) const;

private:
    CatalogSurface(SurfaceKind kind, int dim, std::vector<double> c);

    SurfaceKind kind_;
    int dim_;
    std::vector<double> c_;
};

// Position vector of the log cone in R^4 from hyperbolic coordinates,
//   x = (cosh(c y2) e^{c y1}, cos(c y3) sinh(c y2) e^{c y1},
//        sin(c y3) sinh(c y2) e^{c y1}, -y1/c),
// defined for y2 > 0.
Eigen::Vector4d logcone_param(double c, double y1, double y2, double y3);

// Jacobian d(x1,x2,x3)/d(y1,y2,y3) of the parametrization above.
Eigen::Matrix3d logcone_param_jacobian(double c, double y1, double y2, double y3);

} // namespace calabi
