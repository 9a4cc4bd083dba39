#include "qkh/fock.hpp"

#include <cmath>

namespace qkh {

Mat make_annihilation(int n_cut) {
    if (n_cut < 2) throw validation_error("make_annihilation: n_cut must be >= 2");
    Mat a = Mat::Zero(n_cut, n_cut);
    for (int n = 0; n + 1 < n_cut; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
    return a;
}

HermitianEigen hermitian_eigen(const Mat& herm) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(herm);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigen: eigen decomposition failed");
    return HermitianEigen{solver.eigenvalues(), solver.eigenvectors()};
}

FockSpace::FockSpace(int n) : n_cut(n) {
    a_ = make_annihilation(n_cut);
    adag_ = a_.adjoint();
    n_ = adag_ * a_;
    q_ = a_ + adag_;
    q_eig_ = hermitian_eigen(q_);
}

Mat interior_block(const Mat& m, int margin) {
    const int n = int(m.rows()) - margin;
    if (n <= 0) throw validation_error("interior_block: margin leaves no interior levels");
    return m.topLeftCorner(n, n);
}

double interior_norm(const Mat& m, int margin) { return interior_block(m, margin).norm(); }

IdentityComponent identity_component(const Mat& m, int margin) {
    Mat blk = interior_block(m, margin);
    const std::complex<double> s = blk.trace() / double(blk.rows());
    blk.diagonal().array() -= s;
    return IdentityComponent{s, blk.norm()};
}

}  // namespace qkh
