// grid.hpp — Uniform 1D spatial grid and its spectral (FFT) wavenumbers.

#pragma once

#include <vector>

#include "qkh/errors.hpp"

namespace qkh {

struct SpatialGrid {
    int n_points = 0;
    double x_min = 0.0;
    double x_max = 0.0;

    SpatialGrid() = default;
    SpatialGrid(int n, double xmin, double xmax);

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return x_min + spacing() * i; }

    // Period of the spectral representation (one spacing past x_max wraps to x_min).
    double period() const { return spacing() * n_points; }

    // FFT-ordered wavenumber of bin j: 0, dk, ..., then negative frequencies.
    double k(int j) const;

    bool power_of_two() const { return n_points > 0 && (n_points & (n_points - 1)) == 0; }
    void require_spectral() const;

    std::vector<double> x_values() const;
    std::vector<double> k_values() const;
};

}  // namespace qkh
