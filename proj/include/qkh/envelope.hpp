// envelope.hpp — Smooth drive envelopes with closed-form derivatives.
//
// All kinds satisfy 0 <= f <= 1, vanish with their first derivative at the
// support endpoints (the gaussian kind to 1e-8, enforced by a width cap), and
// are identically zero outside [t_start, t_end].

#pragma once

#include <string>

#include "qkh/errors.hpp"

namespace qkh {

enum class EnvelopeKind {
    sin_squared,
    flat_top_cosine_ramps,
    gaussian,
};

struct Envelope {
    EnvelopeKind kind = EnvelopeKind::sin_squared;
    double t_start = 0.0;
    double t_end = 1.0;
    // flat_top_cosine_ramps: fraction of the duration spent on each cosine
    // ramp, in [0, 0.5]. Zero degenerates to a constant f == 1 on the support,
    // the time-independent coupling used by the mode-continuum comparisons.
    double ramp_fraction = 0.25;
    // gaussian: standard deviation; capped at duration/12 so the envelope at
    // the endpoints is below 1e-8.
    double sigma = 0.0;

    double duration() const { return t_end - t_start; }

    // Characteristic variation time scale T; the envelope rate is 1/T.
    double time_scale() const;

    // Per-kind constant in the slow-envelope bound: T * max|f'|.
    double rate_constant() const;

    void validate() const;
};

struct EnvelopeSample {
    double f = 0.0;
    double df = 0.0;
    double d2f = 0.0;
};

// Evaluate f, f', f'' at time t (clamped to zero outside the support).
EnvelopeSample envelope_eval(const Envelope& env, double t);

Envelope make_sin_squared(double t_start, double t_end);
Envelope make_flat_top(double t_start, double t_end, double ramp_fraction);
Envelope make_gaussian(double t_start, double t_end, double sigma);

std::string to_string(EnvelopeKind kind);
EnvelopeKind envelope_kind_from_string(const std::string& name);

}  // namespace qkh
