// potential.hpp — Trap potentials on the grid.

#pragma once

#include <string>
#include <vector>

#include "qkh/errors.hpp"
#include "qkh/grid.hpp"

namespace qkh {

enum class PotentialKind {
    harmonic,       // m Omega^2 x^2 / 2
    gaussian_well,  // -V0 exp(-x^2 / (2 w^2))
    soft_core,      // -V0 / sqrt(x^2 + s^2)
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::harmonic;
    double omega_trap = 1.0;  // harmonic
    double depth = 1.0;       // gaussian_well / soft_core V0
    double width = 1.0;       // gaussian_well w
    double softening = 1.0;   // soft_core s
    double mass = 1.0;

    void validate() const;

    double value(double x) const;
    double derivative(double x) const;
    // Upper bound of |V^(order)| over [-r, r], evaluated on a scan grid; used
    // by the Taylor remainder monitor.
    double derivative_bound(int order, double r) const;

    std::vector<double> values(const SpatialGrid& grid) const;
};

PotentialSpec make_harmonic(double omega_trap, double mass = 1.0);
PotentialSpec make_gaussian_well(double depth, double width);
PotentialSpec make_soft_core(double depth, double softening);

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

}  // namespace qkh
