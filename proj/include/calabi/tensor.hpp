#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "calabi/jet.hpp"

namespace calabi {

// Small dense tensors in coordinate indices; full symmetry is stored
// redundantly, which keeps the contractions below straightforward.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}
    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
    double operator()(int i, int j, int k) const { return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }

private:
    int n_ = 0;
    std::vector<double> v_;
};

class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
    int dim() const { return n_; }
    double& operator()(int i, int j, int k, int l) {
        return v_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return v_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }

private:
    int n_ = 0;
    std::vector<double> v_;
};

// Calabi metric block: G = Hess f, its inverse and determinant. The
// Weingarten tensor of this normalization vanishes identically, so it is not
// stored.
struct MetricData {
    int dim = 0;
    Eigen::MatrixXd G;
    Eigen::MatrixXd Ginv;
    double detG = 0.0;
};

// Cubic form A_ijk = -f_ijk/2, Christoffel symbols of the Calabi metric, and
// the covariant derivative A_ijk,l (last index is the derivative).
struct CubicData {
    int dim = 0;
    Tensor3 A;
    Tensor3 Gamma; // Gamma(k,i,j) = Gamma^k_ij
    std::optional<Tensor4> covA;
    double covA_norm2 = 0.0; // full G-contraction; 0 when covA absent
};

// Curvature and the scalar invariants derived from it.
struct CurvatureData {
    int dim = 0;
    Tensor4 riem;        // R_ijkl, all indices down
    Eigen::MatrixXd ric; // R_ik
    double scalar_trace = 0.0;      // G-trace of Ricci
    double scalar_pick = 0.0;       // n(n-1)J - n^2 |T|^2
    double scalar_discrepancy = 0.0;
    Eigen::VectorXd tcheb_vec; // T^l
    Eigen::VectorXd tcheb_cov; // T_l
    double tcheb_norm2 = 0.0;  // |T|^2
    double pick_J = 0.0;
    double riem_norm2 = 0.0;             // full G-contraction of Riem
    std::optional<double> covA_norm2;    // present when the jet had order 4
};

// Everything the downstream modules need at one point.
struct TensorBundle {
    int dim = 0;
    std::vector<double> point;
    MetricData metric;
    CubicData cubic;
    CurvatureData curv;
};

// Abar_abc = A_ijk E_ia E_jb E_kc for an n x m frame matrix E (m <= n).
Tensor3 contract_frame(const Tensor3& A, const Eigen::MatrixXd& E);

// Columns form a G-orthonormal frame (inverse transpose of the Cholesky
// factor of G).
Eigen::MatrixXd g_orthonormal_frame(const Eigen::MatrixXd& G);

// G from the order-2 block; throws NotPositiveDefinite outside the
// strict-convexity domain.
MetricData metric_at(const Jet4& jet);

// A, Gamma, and (when the jet has order 4) the covariant derivative of A.
CubicData cubic_at(const Jet4& jet);

// Riemann/Ricci/scalar curvature, Tchebychev field and Pick invariant.
// Requires order >= 3; fills covA_norm2 only for order-4 jets.
CurvatureData curvature_at(const Jet4& jet);

TensorBundle bundle_at(const Jet4& jet);

// Residuals of the two right-hand sides that must vanish on a surface with
// parallel cubic form:
//   first:  |sum R_ij T^i T^j|
//   second: |sum (R_ijkl)^2 + sum R_ij A_ipq A_jpq|   (G-contracted)
std::pair<double, double> parallel_rhs_checks(const Jet4& jet);
std::pair<double, double> parallel_rhs_checks(const TensorBundle& bundle);

// The fourth-order operator Delta ln det(Hess f) evaluated at the point of an
// order-4 jet; zero characterizes affine extremal graphs.
double extremal_residual(const Jet4& jet);

} // namespace calabi
