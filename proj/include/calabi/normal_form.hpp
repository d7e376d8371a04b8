#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "calabi/tensor.hpp"

namespace calabi {

// Ejiri frame data at one point: a G-orthonormal basis whose first vector
// maximizes A(v,v,v) on the unit sphere and diagonalizes A(e1,.,.), the
// resulting mu-spectrum, and the cubic form expressed in the frame.
struct NormalForm {
    int dim = 0;
    Eigen::MatrixXd basis;    // columns e_1..e_n, G-orthonormal
    Eigen::VectorXd spectrum; // mu_1 >= 0; mu_2..mu_n sorted descending
    int case_index = -1;      // 0..n once classified, -1 otherwise
    double max_offdiag = 0.0; // max |A(e1,e_i,e_j)|, i != j
    Tensor3 frame_cubic;      // Abar_ijk = A(e_i,e_j,e_k)
};

struct NormalFormOptions {
    int multistarts = 32;
    std::uint64_t seed = 0x0e51;
    int power_iterations = 300;
    int newton_iterations = 30;
    double tie_tol = 1e-6;         // relative tolerance for equal-mu grouping / case patterns
    double criticality_tol = 1e-8; // Lagrange-condition residual bound
};

struct MaximizeResult {
    Eigen::VectorXd direction; // G-unit vector e_1
    double mu = 0.0;           // maximal cubic value, >= 0
    double residual = 0.0;     // ||A(e1,e1,.)# - mu e1|| in the G-orthonormal frame
};

// Global maximization of F(v) = A(v,v,v) over the G-unit sphere by shifted
// power iterations with Newton polish, over >= 32 deterministic starts.
MaximizeResult maximize_cubic(const TensorBundle& bundle, const NormalFormOptions& opts = {});

// Completes e1 to the Ejiri basis: diagonalizes v -> A(e1,v,.) on the
// complement of e1 and re-maximizes the restricted cubic inside every
// eigenspace with equal mu. Does not classify (case_index stays -1).
NormalForm build_basis(const TensorBundle& bundle, const Eigen::VectorXd& e1,
                       const NormalFormOptions& opts = {});

// Maps a spectrum onto the case list: C0 when mu_1 < tol; otherwise C_i where
// i-1 is the number of mu_j within tol*mu_1 of mu_1/2 and every remaining
// mu_j is below tol*mu_1 in magnitude. Throws PatternMismatch otherwise.
int classify_case(const Eigen::VectorXd& spectrum, double tol);

std::string case_name(int case_index);

// maximize_cubic + build_basis + classify_case in one call.
NormalForm normal_form_at(const TensorBundle& bundle, const NormalFormOptions& opts = {});

} // namespace calabi
