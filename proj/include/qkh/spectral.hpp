// spectral.hpp — Batched FFT workspace for grid <-> momentum transforms of
// composite amplitudes (one transform per Fock column).

#pragma once

#include <Eigen/Dense>

namespace qkh {

class SpectralWorkspace {
public:
    SpectralWorkspace(int n_points, int n_columns);
    ~SpectralWorkspace();

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int n_points() const { return n_points_; }
    int n_columns() const { return n_columns_; }

    // In-place transforms on an (n_points x n_columns) column-major array.
    // to_position applies the 1/N normalization.
    void to_momentum(Eigen::MatrixXcd& amplitudes) const;
    void to_position(Eigen::MatrixXcd& amplitudes) const;

private:
    int n_points_;
    int n_columns_;
    void* plan_forward_;
    void* plan_backward_;
};

}  // namespace qkh
