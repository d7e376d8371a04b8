#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "calabi/catalog.hpp"
#include "calabi/tensor.hpp"

namespace calabi {

// Constant diagonal cubic data of a flat-parallel hypersurface in flat
// orthonormal coordinates: Abar_111 >= ... >= Abar_rrr > 0, zero past r,
// together with the target coordinates v^i > 0 of the point to reach.
struct FlatParallelData {
    int dim = 0;              // n
    std::vector<double> diag; // r values, descending, positive
    std::vector<double> v;    // n values, positive

    int r() const { return static_cast<int>(diag.size()); }
    void validate() const; // throws InvalidArgument
};

struct IntegrationResult {
    Eigen::VectorXd x_end;         // position x(1) in R^{n+1}
    std::vector<Eigen::VectorXd> frames_end; // frame vectors at t = 1
    double error_estimate = 0.0;   // Richardson estimate against half steps
};

// Integrates the frame equations
//   d e_i/dt = Abar_iii v^i e_i + v^i e,   dx/dt = sum_i v^i e_i
// from e_i(0) = standard basis, x(0) = 0, with the classical 4-stage
// one-step method. Throws ConvergenceError when the step count is too small
// for the 1e-6 error estimate.
IntegrationResult integrate_frames(const FlatParallelData& data, int steps);

// Exact evaluation of the integrated position at t = 1.
Eigen::VectorXd closed_form(const FlatParallelData& data);

// The surface the data reconstructs: Q(c_1..c_r; n) with c_i = 1/Abar_iii^2,
// or the paraboloid when r = 0.
CatalogSurface recovered_surface(const FlatParallelData& data);
FunctionSpec recovered_function(const FlatParallelData& data);

// Second integrator variant: the hyperbolic frame system of the log cone,
// driven along a straight segment in (y1,y2,y3) with y2 > 0 throughout.
// Serves as an independent oracle for logcone_param.
Eigen::Vector4d integrate_hyperbolic_frames(double c, const Eigen::Vector3d& y_from,
                                            const Eigen::Vector3d& y_to, int steps);

// |Abar_iii| of the frame cubic at one point of a flat surface, descending:
// the cubic is moved to a G-orthonormal frame, its slice matrices (which
// commute exactly when the metric is flat) are jointly diagonalized, and the
// rotated diagonal collected. Completes the reconstruction round trip.
std::vector<double> frame_cubic_diagonal(const TensorBundle& bundle,
                                         std::uint64_t seed = 0x5eed);

} // namespace calabi
