#include "qkh/potential.hpp"

#include <algorithm>
#include <cmath>

namespace qkh {

void PotentialSpec::validate() const {
    if (!(mass > 0.0)) throw validation_error("PotentialSpec: mass must be positive");
    switch (kind) {
        case PotentialKind::harmonic:
            if (!(omega_trap > 0.0))
                throw validation_error("PotentialSpec: harmonic trap frequency must be positive");
            break;
        case PotentialKind::gaussian_well:
            if (!(depth > 0.0) || !(width > 0.0))
                throw validation_error("PotentialSpec: gaussian well needs positive depth and width");
            break;
        case PotentialKind::soft_core:
            if (!(depth > 0.0) || !(softening > 0.0))
                throw validation_error("PotentialSpec: soft core needs positive depth and softening");
            break;
    }
}

double PotentialSpec::value(double x) const {
    switch (kind) {
        case PotentialKind::harmonic:
            return 0.5 * mass * omega_trap * omega_trap * x * x;
        case PotentialKind::gaussian_well:
            return -depth * std::exp(-x * x / (2.0 * width * width));
        case PotentialKind::soft_core:
            return -depth / std::sqrt(x * x + softening * softening);
    }
    return 0.0;
}

double PotentialSpec::derivative(double x) const {
    switch (kind) {
        case PotentialKind::harmonic:
            return mass * omega_trap * omega_trap * x;
        case PotentialKind::gaussian_well:
            return depth * x / (width * width) * std::exp(-x * x / (2.0 * width * width));
        case PotentialKind::soft_core:
            return depth * x / std::pow(x * x + softening * softening, 1.5);
    }
    return 0.0;
}

double PotentialSpec::derivative_bound(int order, double r) const {
    if (kind == PotentialKind::harmonic) {
        if (order == 0) return value(r);
        if (order == 1) return mass * omega_trap * omega_trap * r;
        if (order == 2) return mass * omega_trap * omega_trap;
        return 0.0;
    }
    // Scan a central finite-difference estimate of V^(order) over the range.
    const int samples = 512;
    const double h = std::max(1e-3, r / samples) * 0.5;
    double bound = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = -r + 2.0 * r * i / samples;
        double est = 0.0;
        switch (order) {
            case 0:
                est = value(x);
                break;
            case 1:
                est = derivative(x);
                break;
            default: {
                // Repeated central differences of V' for order >= 2.
                const int extra = order - 1;
                std::vector<double> vals(extra + 1);
                for (int j = 0; j <= extra; ++j)
                    vals[j] = derivative(x + h * (j - 0.5 * extra));
                for (int level = 0; level < extra; ++level)
                    for (int j = 0; j + 1 < int(vals.size()) - level; ++j)
                        vals[j] = (vals[j + 1] - vals[j]) / h;
                est = vals[0];
                break;
            }
        }
        bound = std::max(bound, std::abs(est));
    }
    return bound;
}

std::vector<double> PotentialSpec::values(const SpatialGrid& grid) const {
    std::vector<double> v(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) v[i] = value(grid.x(i));
    return v;
}

PotentialSpec make_harmonic(double omega_trap, double mass) {
    PotentialSpec spec;
    spec.kind = PotentialKind::harmonic;
    spec.omega_trap = omega_trap;
    spec.mass = mass;
    spec.validate();
    return spec;
}

PotentialSpec make_gaussian_well(double depth, double width) {
    PotentialSpec spec;
    spec.kind = PotentialKind::gaussian_well;
    spec.depth = depth;
    spec.width = width;
    spec.validate();
    return spec;
}

PotentialSpec make_soft_core(double depth, double softening) {
    PotentialSpec spec;
    spec.kind = PotentialKind::soft_core;
    spec.depth = depth;
    spec.softening = softening;
    spec.validate();
    return spec;
}

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::harmonic:
            return "harmonic";
        case PotentialKind::gaussian_well:
            return "gaussian_well";
        case PotentialKind::soft_core:
            return "soft_core";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
    if (name == "harmonic") return PotentialKind::harmonic;
    if (name == "gaussian_well") return PotentialKind::gaussian_well;
    if (name == "soft_core") return PotentialKind::soft_core;
    throw validation_error("unknown potential kind: " + name);
}

}  // namespace qkh
