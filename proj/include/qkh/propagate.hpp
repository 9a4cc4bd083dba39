// propagate.hpp — Time evolution of the composite system in the lab frame,
// the transformed (effective-field) frame, and the static mode-continuum
// frame, plus the observables that make frames comparable.
//
// The split-step factor for V(x - alpha) is evaluated exactly for every
// potential kind: alpha(t) = ell f(t) (a + a†) is diagonal in the fixed
// quadrature eigenbasis, so the potential factor is a phase table over
// (grid point, quadrature eigenvalue). A Taylor-expanded coupling with a
// per-step remainder monitor is available as an alternative scheme.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qkh/bath.hpp"
#include "qkh/drive.hpp"
#include "qkh/effective.hpp"
#include "qkh/potential.hpp"
#include "qkh/state.hpp"

namespace qkh {

enum class Scheme { split_step_spectral, crank_nicolson };
enum class CouplingScheme { exact_eigenbasis, taylor };

struct AbsorberSpec {
    bool enabled = false;
    // Defaults tuned so a quartic-onset layer reflects < 1e-4 at momentum ~3
    // in natural units (verified by the wave-packet reflection test).
    double strength = 10.0;
    double onset_fraction = 0.55;  // onset at this fraction of the half-width
    void validate() const;
};

struct PropagatorConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::split_step_spectral;
    CouplingScheme coupling = CouplingScheme::exact_eigenbasis;
    int taylor_order = 2;  // escalates to 4 on remainder violation, then errors
    AbsorberSpec absorber;
    long max_steps = 20000000;
    int sample_every = 16;
    bool stability_audit = true;
    double leak_warn = 1e-6;
    double leak_error = 1e-3;

    void validate() const;
};

// Per-step Taylor remainder bound and the audit phase thresholds.
inline constexpr double taylor_remainder_tol = 1e-8;
inline constexpr double audit_max_phase_per_step = 1.5707963267948966;  // pi/2

struct TrapRegion {
    double x_lo = 0.0;
    double x_hi = 0.0;
};

struct ObservableSeries {
    std::vector<double> t;
    std::vector<double> norm;
    std::vector<double> x_mean;
    std::vector<double> p_mean;
    std::vector<double> escape;
    std::vector<double> var_x;  // oscillator quadrature variances
    std::vector<double> var_p;
    std::vector<double> energy;
    std::vector<double> leakage;
    std::vector<std::string> warnings;

    std::size_t size() const { return t.size(); }
    static std::string csv_header();
    std::string to_csv() const;
};

// Optional c-number trap trajectory added to the potential argument,
// V(x - shift(t) - alpha_op(t)); realizes classically shaken traps and the
// displaced-frame reduction of coherent-state drives.
using ClassicalShift = std::function<double(double)>;

// Lab frame: p^2/2m + V(x - alpha(t)) + w a†a.
ObservableSeries evolve_lab(CompositeState& state, const PotentialSpec& potential,
                            const DriveSpec& spec, const PropagatorConfig& config, double t0,
                            double t1, std::optional<TrapRegion> region = std::nullopt,
                            const ClassicalShift& shift = nullptr);

// Transformed frame: p^2/2m + V(x) + m x acceleration_R(t) at the given order.
ObservableSeries evolve_final(CompositeState& state, const PotentialSpec& potential,
                              const DriveSpec& spec, int order, const PropagatorConfig& config,
                              double t0, double t1,
                              std::optional<TrapRegion> region = std::nullopt);

// Mode continuum: p^2/2m + V(x - alpha_bath) + sum_m w_m a_m†a_m, static.
ObservableSeries evolve_continuum(CompositeState& state, const PotentialSpec& potential,
                                  const BathSpec& bath, const PropagatorConfig& config, double t0,
                                  double t1, std::optional<TrapRegion> region = std::nullopt);

// Particle-only propagation under V(x - shift(t)) + m x field(t); used by the
// classical transformation chain and as the n_cut = 1 special case.
ObservableSeries evolve_classical(CompositeState& state, const PotentialSpec& potential,
                                  const PropagatorConfig& config, double t0, double t1,
                                  const ClassicalShift& shift = nullptr,
                                  const ClassicalShift& dipole_field = nullptr,
                                  std::optional<TrapRegion> region = std::nullopt);

// --------------------------------------------------------------------------

double escape_probability(const CompositeState& state, const TrapRegion& region);

struct QuadratureVariances {
    double var_x;
    double var_p;
    double covariance;
};
QuadratureVariances quadrature_variances(const Mat& density_matrix);
// Smallest variance over all rotated quadratures (minor eigenvalue of the
// 2x2 covariance matrix).
double minimal_quadrature_variance(const QuadratureVariances& v);

double fidelity(const CompositeState& a, const CompositeState& b);

}  // namespace qkh
