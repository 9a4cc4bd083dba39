#include "qkh/grid.hpp"

#include <cmath>

#include "qkh/constants.hpp"

namespace qkh {

SpatialGrid::SpatialGrid(int n, double xmin, double xmax) : n_points(n), x_min(xmin), x_max(xmax) {
    if (n_points < 8) throw validation_error("SpatialGrid: n_points must be >= 8");
    if (!(x_max > x_min)) throw validation_error("SpatialGrid: x_max must exceed x_min");
}

double SpatialGrid::k(int j) const {
    const double dk = two_pi / period();
    const int half = n_points / 2;
    return dk * (j <= half ? j : j - n_points);
}

void SpatialGrid::require_spectral() const {
    if (!power_of_two())
        throw validation_error("SpatialGrid: spectral propagation requires n_points to be a power of two");
}

std::vector<double> SpatialGrid::x_values() const {
    std::vector<double> xs(n_points);
    for (int i = 0; i < n_points; ++i) xs[i] = x(i);
    return xs;
}

std::vector<double> SpatialGrid::k_values() const {
    std::vector<double> ks(n_points);
    for (int j = 0; j < n_points; ++j) ks[j] = k(j);
    return ks;
}

}  // namespace qkh
