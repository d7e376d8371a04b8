#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "calabi/errors.hpp"

namespace calabi {

// A family of pairwise-commuting real symmetric matrices.
struct SymFamily {
    std::vector<Eigen::MatrixXd> matrices;
    double commute_tol = 1e-10;

    void validate() const; // throws InvalidArgument / CommutatorError
};

struct SimDiagResult {
    Eigen::MatrixXd P;           // orthogonal; P * A_k * P^T diagonal for all k
    Eigen::MatrixXd eigenvalues; // m x n, row k = diag(P * A_k * P^T)
    double max_offdiag = 0.0;    // worst |offdiag| / (1 + ||A_k||_F)
    double orthogonality = 0.0;  // ||P^T P - I||_inf
};

// Diagonalizes the whole family with one orthogonal matrix: a random convex
// combination of the members is diagonalized first; eigenvalue clusters of
// the combination are refined recursively on the restricted blocks. The seed
// fixes the combination weights, making the result deterministic.
SimDiagResult simultaneous_diagonalize(const SymFamily& family, std::uint64_t seed = 0x5eed);

} // namespace calabi
