// fock.hpp — Truncated bosonic Fock space: ladder matrices, quadrature
// eigenbases, and interior-block helpers for truncation-defect bookkeeping.

#pragma once

#include <Eigen/Dense>

#include "qkh/errors.hpp"

namespace qkh {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Truncated annihilation matrix: sqrt(n+1) on the first superdiagonal.
Mat make_annihilation(int n_cut);

// Eigen-decomposition of a Hermitian oscillator-side matrix, used to apply
// exponentials of single-quadrature generators exactly on the truncated space.
struct HermitianEigen {
    Eigen::VectorXd values;
    Mat vectors;  // columns are eigenvectors
};

HermitianEigen hermitian_eigen(const Mat& herm);

struct FockSpace {
    int n_cut = 0;

    explicit FockSpace(int n);

    const Mat& annihilation() const { return a_; }
    const Mat& creation() const { return adag_; }
    const Mat& number() const { return n_; }
    // Position-like quadrature a + a† and its cached eigensystem.
    const Mat& quadrature() const { return q_; }
    const HermitianEigen& quadrature_eigen() const { return q_eig_; }

private:
    Mat a_, adag_, n_, q_;
    HermitianEigen q_eig_;
};

// Top-left (n - margin) x (n - margin) block, where truncation defects of
// degree-`margin` operator polynomials cannot reach.
Mat interior_block(const Mat& m, int margin);

// Frobenius norm of the interior block of `m`.
double interior_norm(const Mat& m, int margin);

// Decompose M = s*I + D on the interior block: returns the mean diagonal
// scalar s and the Frobenius norm of the off-identity remainder D.
struct IdentityComponent {
    std::complex<double> scalar;
    double defect;
};
IdentityComponent identity_component(const Mat& m, int margin);

}  // namespace qkh
