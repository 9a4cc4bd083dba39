#include "qkh/envelope.hpp"

#include <cmath>

#include "qkh/constants.hpp"

namespace qkh {

void Envelope::validate() const {
    if (!(t_end > t_start)) throw validation_error("Envelope: t_end must exceed t_start");
    switch (kind) {
        case EnvelopeKind::flat_top_cosine_ramps:
            if (ramp_fraction < 0.0 || ramp_fraction > 0.5)
                throw validation_error("Envelope: ramp_fraction must lie in [0, 0.5]");
            break;
        case EnvelopeKind::gaussian:
            if (!(sigma > 0.0)) throw validation_error("Envelope: gaussian sigma must be positive");
            if (sigma > duration() / 13.0)
                throw validation_error(
                    "Envelope: gaussian sigma must be <= duration/13 so the endpoints vanish to 1e-8");
            break;
        case EnvelopeKind::sin_squared:
            break;
    }
}

double Envelope::time_scale() const {
    switch (kind) {
        case EnvelopeKind::gaussian:
            return sigma;
        case EnvelopeKind::flat_top_cosine_ramps:
            // Zero-ramp flat top never varies; report the full duration.
            return ramp_fraction > 0.0 ? ramp_fraction * duration() : duration();
        case EnvelopeKind::sin_squared:
        default:
            return duration();
    }
}

double Envelope::rate_constant() const {
    switch (kind) {
        case EnvelopeKind::gaussian:
            return std::exp(-0.5);  // sigma * max|f'|
        case EnvelopeKind::flat_top_cosine_ramps:
            return ramp_fraction > 0.0 ? pi / 2.0 : 0.0;
        case EnvelopeKind::sin_squared:
        default:
            return pi;
    }
}

namespace {

EnvelopeSample eval_sin_squared(const Envelope& env, double t) {
    const double w = pi / env.duration();
    const double u = w * (t - env.t_start);
    const double s = std::sin(u), c = std::cos(u);
    return {s * s, 2.0 * w * s * c, 2.0 * w * w * (c * c - s * s)};
}

EnvelopeSample eval_flat_top(const Envelope& env, double t) {
    const double ramp = env.ramp_fraction * env.duration();
    if (ramp <= 0.0) return {1.0, 0.0, 0.0};
    double u;  // progress through a rising cosine ramp, in [0, 1]
    double direction = 1.0;
    if (t < env.t_start + ramp) {
        u = (t - env.t_start) / ramp;
    } else if (t > env.t_end - ramp) {
        u = (env.t_end - t) / ramp;
        direction = -1.0;
    } else {
        return {1.0, 0.0, 0.0};
    }
    const double s = std::sin(pi * u), c = std::cos(pi * u);
    const double w = pi / ramp;
    return {0.5 * (1.0 - c), direction * 0.5 * w * s, 0.5 * w * w * c};
}

EnvelopeSample eval_gaussian(const Envelope& env, double t) {
    const double tc = 0.5 * (env.t_start + env.t_end);
    const double z = (t - tc) / env.sigma;
    const double f = std::exp(-0.5 * z * z);
    const double df = -z / env.sigma * f;
    const double d2f = (z * z - 1.0) / (env.sigma * env.sigma) * f;
    return {f, df, d2f};
}

}  // namespace

EnvelopeSample envelope_eval(const Envelope& env, double t) {
    if (t < env.t_start || t > env.t_end) return {0.0, 0.0, 0.0};
    switch (env.kind) {
        case EnvelopeKind::sin_squared:
            return eval_sin_squared(env, t);
        case EnvelopeKind::flat_top_cosine_ramps:
            return eval_flat_top(env, t);
        case EnvelopeKind::gaussian:
            return eval_gaussian(env, t);
    }
    return {0.0, 0.0, 0.0};
}

Envelope make_sin_squared(double t_start, double t_end) {
    Envelope env{EnvelopeKind::sin_squared, t_start, t_end};
    env.validate();
    return env;
}

Envelope make_flat_top(double t_start, double t_end, double ramp_fraction) {
    Envelope env{EnvelopeKind::flat_top_cosine_ramps, t_start, t_end, ramp_fraction};
    env.validate();
    return env;
}

Envelope make_gaussian(double t_start, double t_end, double sigma) {
    Envelope env{EnvelopeKind::gaussian, t_start, t_end};
    env.sigma = sigma;
    env.validate();
    return env;
}

std::string to_string(EnvelopeKind kind) {
    switch (kind) {
        case EnvelopeKind::sin_squared:
            return "sin_squared";
        case EnvelopeKind::flat_top_cosine_ramps:
            return "flat_top_cosine_ramps";
        case EnvelopeKind::gaussian:
            return "gaussian";
    }
    return "unknown";
}

EnvelopeKind envelope_kind_from_string(const std::string& name) {
    if (name == "sin_squared") return EnvelopeKind::sin_squared;
    if (name == "flat_top_cosine_ramps") return EnvelopeKind::flat_top_cosine_ramps;
    if (name == "gaussian") return EnvelopeKind::gaussian;
    throw validation_error("unknown envelope kind: " + name);
}

}  // namespace qkh
