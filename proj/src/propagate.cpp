#include "qkh/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkh/constants.hpp"
#include "qkh/spectral.hpp"

namespace qkh {

void AbsorberSpec::validate() const {
    if (!enabled) return;
    if (!(strength > 0.0)) throw validation_error("AbsorberSpec: strength must be positive");
    if (!(onset_fraction > 0.0) || !(onset_fraction < 1.0))
        throw validation_error("AbsorberSpec: onset must lie strictly inside the grid");
}

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw validation_error("PropagatorConfig: dt must be positive");
    if (sample_every < 1) throw validation_error("PropagatorConfig: sample_every must be >= 1");
    if (max_steps < 1) throw validation_error("PropagatorConfig: max_steps must be >= 1");
    if (taylor_order < 1 || taylor_order > 4)
        throw validation_error("PropagatorConfig: taylor_order must lie in [1, 4]");
    absorber.validate();
}

std::string ObservableSeries::csv_header() {
    return "t,norm,x_mean,p_mean,escape,var_x,var_p,energy,leakage";
}

std::string ObservableSeries::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << csv_header() << "\n";
    for (std::size_t i = 0; i < size(); ++i) {
        out << t[i] << ',' << norm[i] << ',' << x_mean[i] << ',' << p_mean[i] << ',' << escape[i]
            << ',' << var_x[i] << ',' << var_p[i] << ',' << energy[i] << ',' << leakage[i] << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Public observables

namespace {

double region_probability(const CompositeState& state, const TrapRegion& region) {
    if (region.x_lo < state.grid.x_min - 1e-12 || region.x_hi > state.grid.x_max + 1e-12 ||
        !(region.x_hi > region.x_lo))
        throw validation_error("trap region must lie inside the grid");
    double acc = 0.0;
    for (int i = 0; i < state.grid.n_points; ++i) {
        const double x = state.grid.x(i);
        if (x >= region.x_lo && x <= region.x_hi) acc += state.amplitudes.row(i).squaredNorm();
    }
    return acc * state.dx();
}

}  // namespace

double escape_probability(const CompositeState& state, const TrapRegion& region) {
    return 1.0 - region_probability(state, region) / state.norm_squared();
}

QuadratureVariances quadrature_variances(const Mat& density_matrix) {
    const int n = int(density_matrix.rows());
    if (density_matrix.cols() != n || n < 2)
        throw validation_error("quadrature_variances: need a square density matrix (n >= 2)");
    const Mat a = make_annihilation(n);
    const Mat adag = a.adjoint();
    const Mat x = (a + adag) / std::sqrt(2.0);
    const Mat p = cd(0.0, -1.0) * (a - adag) / std::sqrt(2.0);
    const double tr = density_matrix.trace().real();
    auto avg = [&](const Mat& op) { return ((density_matrix * op).trace() / tr).real(); };
    const double mx = avg(x), mp = avg(p);
    const double vx = avg(x * x) - mx * mx;
    const double vp = avg(p * p) - mp * mp;
    const double cov = 0.5 * avg(x * p + p * x) - mx * mp;
    return {vx, vp, cov};
}

double minimal_quadrature_variance(const QuadratureVariances& v) {
    const double mid = 0.5 * (v.var_x + v.var_p);
    const double rad =
        std::sqrt(0.25 * (v.var_x - v.var_p) * (v.var_x - v.var_p) + v.covariance * v.covariance);
    return mid - rad;
}

double fidelity(const CompositeState& a, const CompositeState& b) {
    if (a.grid.n_points != b.grid.n_points || a.n_cut != b.n_cut)
        throw validation_error("fidelity: shape mismatch");
    const cd overlap = (a.amplitudes.conjugate().cwiseProduct(b.amplitudes)).sum() * a.dx();
    return std::norm(overlap) / (a.norm_squared() * b.norm_squared());
}

// ---------------------------------------------------------------------------
// Shared propagation machinery

namespace {

long step_count(double t0, double t1, const PropagatorConfig& cfg) {
    const double span = t1 - t0;
    if (!(span > 0.0)) throw validation_error("propagate: need t1 > t0");
    const long n = std::max<long>(1, std::lround(span / cfg.dt));
    if (n > cfg.max_steps)
        throw validation_error("propagate: step count exceeds max_steps; raise dt or max_steps");
    return n;
}

std::vector<double> cap_profile(const SpatialGrid& grid, const AbsorberSpec& absorber) {
    std::vector<double> cap(grid.n_points, 0.0);
    if (!absorber.enabled) return cap;
    const double half = 0.5 * (grid.x_max - grid.x_min);
    const double center = 0.5 * (grid.x_max + grid.x_min);
    const double onset = absorber.onset_fraction * half;
    const double thickness = half - onset;
    for (int i = 0; i < grid.n_points; ++i) {
        const double u = (std::abs(grid.x(i) - center) - onset) / thickness;
        if (u > 0.0) cap[i] = absorber.strength * u * u * u * u;
    }
    return cap;
}

void rotate_in(Eigen::MatrixXcd& a, const Mat& basis) { a = a * basis.conjugate(); }
void rotate_out(Eigen::MatrixXcd& a, const Mat& basis) { a = a * basis.transpose(); }

void audit_phase(double phase, const char* what) {
    if (phase > audit_max_phase_per_step) {
        std::ostringstream msg;
        msg << "stability audit: " << what << " phase per step " << phase << " rad exceeds "
            << audit_max_phase_per_step << "; reduce dt";
        throw stability_error(msg.str());
    }
}

// Taylor polynomial of V(x - s) about x; derivatives beyond V' by central
// differences of the closed-form V'.
double taylor_potential(const PotentialSpec& pot, double x, double s, int order) {
    double acc = pot.value(x);
    if (order >= 1) acc -= pot.derivative(x) * s;
    if (order >= 2) {
        const double h = 1e-3;
        const double d2 = (pot.derivative(x + h) - pot.derivative(x - h)) / (2.0 * h);
        acc += 0.5 * d2 * s * s;
        if (order >= 3) {
            const double d3 =
                (pot.derivative(x + h) - 2.0 * pot.derivative(x) + pot.derivative(x - h)) / (h * h);
            acc -= d3 * s * s * s / 6.0;
            if (order >= 4) {
                const double d4 = (pot.derivative(x + 2 * h) - 2.0 * pot.derivative(x + h) +
                                   2.0 * pot.derivative(x - h) - pot.derivative(x - 2 * h)) /
                                  (2.0 * h * h * h);
                acc += d4 * s * s * s * s / 24.0;
            }
        }
    }
    return acc;
}

struct Sampler {
    ObservableSeries series;
    std::optional<TrapRegion> region;
    double initial_norm_sq = 1.0;
    const PropagatorConfig* cfg = nullptr;
    bool warned_leak = false;

    std::function<double(const CompositeState&, double)> energy_fn;
    std::function<double(const CompositeState&)> leakage_fn;
    std::function<QuadratureVariances(const CompositeState&)> variance_fn;

    void sample(const CompositeState& state, double t) {
        state.require_finite();
        const double nsq = state.norm_squared();
        series.t.push_back(t);
        series.norm.push_back(std::sqrt(nsq));
        series.x_mean.push_back(expectation_x(state));
        series.p_mean.push_back(expectation_p(state));
        const double esc = region ? initial_norm_sq - region_probability(state, *region)
                                  : initial_norm_sq - nsq;
        series.escape.push_back(esc);
        QuadratureVariances qv{0.0, 0.0, 0.0};
        if (variance_fn)
            qv = variance_fn(state);
        else if (state.n_cut >= 2)
            qv = quadrature_variances(reduced_oscillator(state));
        series.var_x.push_back(qv.var_x);
        series.var_p.push_back(qv.var_p);
        series.energy.push_back(energy_fn ? energy_fn(state, t) : 0.0);
        const double leak = leakage_fn ? leakage_fn(state)
                                       : (state.n_cut >= 2 ? state.top_level_population() : 0.0);
        series.leakage.push_back(leak);
        if (leak > cfg->leak_error) {
            std::ostringstream msg;
            msg << "truncation leakage " << leak << " at t = " << t
                << " exceeds the error threshold " << cfg->leak_error << "; raise n_cut";
            throw truncation_error(msg.str());
        }
        if (leak > cfg->leak_warn && !warned_leak) {
            std::ostringstream msg;
            msg << "truncation leakage " << leak << " at t = " << t << " exceeds " << cfg->leak_warn;
            series.warnings.push_back(msg.str());
            warned_leak = true;
        }
    }
};

struct SplitStepPlan {
    SpectralWorkspace ws;
    Vec kinetic_full;
    std::vector<double> cap;

    SplitStepPlan(const SpatialGrid& g, int fock_dim, double mass, double dt,
                  const AbsorberSpec& absorber)
        : ws(g.n_points, fock_dim) {
        g.require_spectral();
        kinetic_full.resize(g.n_points);
        for (int j = 0; j < g.n_points; ++j) {
            const double k = g.k(j);
            kinetic_full(j) = std::exp(cd(0.0, -dt * 0.5 * k * k / mass));
        }
        cap = cap_profile(g, absorber);
    }

    void apply_kinetic(Eigen::MatrixXcd& a) {
        ws.to_momentum(a);
        a.array().colwise() *= kinetic_full.array();
        ws.to_position(a);
    }
};

// Crank-Nicolson with a 3-point Laplacian (Dirichlet boundaries) and one dense
// oscillator block per grid point; scalar off-diagonal couplings admit a block
// Thomas solve.
struct CrankNicolson {
    int n_points, n_cut;
    double kin_diag, kin_off;
    cd lam_lhs, lam_rhs;
    std::vector<Mat> d_blocks;  // I + i dt/2 (W_g + kin_diag I)
    std::vector<Mat> b_blocks;  // I - i dt/2 (W_g + kin_diag I)

    CrankNicolson(const SpatialGrid& grid, int fock_dim, double mass, double dt)
        : n_points(grid.n_points), n_cut(fock_dim) {
        const double dx = grid.spacing();
        kin_diag = 1.0 / (mass * dx * dx);
        kin_off = -0.5 / (mass * dx * dx);
        lam_lhs = cd(0.0, 0.5 * dt) * kin_off;
        lam_rhs = cd(0.0, -0.5 * dt) * kin_off;
        d_blocks.resize(n_points);
        b_blocks.resize(n_points);
    }

    void assemble(const std::vector<Mat>& w_blocks, double dt) {
        const Mat eye = Mat::Identity(n_cut, n_cut);
        for (int g = 0; g < n_points; ++g) {
            const Mat h = w_blocks[g] + kin_diag * eye;
            d_blocks[g] = eye + cd(0.0, 0.5 * dt) * h;
            b_blocks[g] = eye - cd(0.0, 0.5 * dt) * h;
        }
    }

    void step(Eigen::MatrixXcd& a) {
        Eigen::MatrixXcd rhs(n_points, n_cut);
        for (int g = 0; g < n_points; ++g) {
            Eigen::VectorXcd r = b_blocks[g] * a.row(g).transpose();
            if (g > 0) r += lam_rhs * a.row(g - 1).transpose();
            if (g + 1 < n_points) r += lam_rhs * a.row(g + 1).transpose();
            rhs.row(g) = r.transpose();
        }
        const Mat eye = Mat::Identity(n_cut, n_cut);
        std::vector<Mat> c(n_points);
        std::vector<Vec> d(n_points);
        {
            Eigen::PartialPivLU<Mat> lu(d_blocks[0]);
            c[0] = lu.solve(lam_lhs * eye);
            d[0] = lu.solve(Vec(rhs.row(0).transpose()));
        }
        for (int g = 1; g < n_points; ++g) {
            Eigen::PartialPivLU<Mat> lu(d_blocks[g] - lam_lhs * c[g - 1]);
            if (g + 1 < n_points) c[g] = lu.solve(lam_lhs * eye);
            d[g] = lu.solve(Vec(rhs.row(g).transpose()) - lam_lhs * d[g - 1]);
        }
        a.row(n_points - 1) = d[n_points - 1].transpose();
        for (int g = n_points - 2; g >= 0; --g)
            a.row(g) = (d[g] - c[g] * Vec(a.row(g + 1).transpose())).transpose();
    }
};

double max_abs(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lab frame

ObservableSeries evolve_lab(CompositeState& state, const PotentialSpec& potential,
                            const DriveSpec& spec, const PropagatorConfig& config, double t0,
                            double t1, std::optional<TrapRegion> region,
                            const ClassicalShift& shift) {
    potential.validate();
    spec.validate();
    config.validate();
    const long n_steps = step_count(t0, t1, config);
    const double dt = (t1 - t0) / double(n_steps);
    const double mass = potential.mass;
    const FockSpace fock(state.n_cut);
    const Mat& vq = fock.quadrature_eigen().vectors;
    const Eigen::VectorXd& qvals = fock.quadrature_eigen().values;

    const std::vector<double> vgrid = potential.values(state.grid);
    if (config.stability_audit) {
        audit_phase(dt * max_abs(vgrid), "potential");
        audit_phase(dt * spec.omega * (state.n_cut - 1), "oscillator");
    }

    Sampler sampler;
    sampler.region = region;
    sampler.cfg = &config;
    sampler.initial_norm_sq = state.norm_squared();
    sampler.energy_fn = [&](const CompositeState& s, double t) {
        const double nsq = s.norm_squared();
        const double f = envelope_eval(spec.envelope, t).f;
        const double off = shift ? shift(t) : 0.0;
        Eigen::MatrixXcd rotated = s.amplitudes;
        rotate_in(rotated, vq);
        double pot_term = 0.0;
        for (int k = 0; k < s.n_cut; ++k)
            for (int g = 0; g < s.grid.n_points; ++g)
                pot_term += potential.value(s.grid.x(g) - off - spec.ell * f * qvals(k)) *
                            std::norm(rotated(g, k));
        pot_term *= s.dx();
        const double num_term = spec.omega * expectation_osc(s, fock.number()).real();
        return expectation_kinetic(s, mass) + (pot_term + num_term) / nsq;
    };

    auto build_w_blocks = [&](double t_mid, std::vector<Mat>& w_blocks,
                              const std::vector<double>& cap) {
        const double f = envelope_eval(spec.envelope, t_mid).f;
        const double off = shift ? shift(t_mid) : 0.0;
        Eigen::VectorXcd diag(state.n_cut);
        for (int g = 0; g < state.grid.n_points; ++g) {
            for (int k = 0; k < state.n_cut; ++k)
                diag(k) = cd(potential.value(state.grid.x(g) - off - spec.ell * f * qvals(k)),
                             -cap[g]);
            Mat w = vq * diag.asDiagonal() * vq.adjoint();
            for (int n = 0; n < state.n_cut; ++n) w(n, n) += spec.omega * n;
            w_blocks[g] = w;
        }
    };

    if (config.scheme == Scheme::crank_nicolson) {
        CrankNicolson cn(state.grid, state.n_cut, mass, dt);
        const std::vector<double> cap = cap_profile(state.grid, config.absorber);
        std::vector<Mat> w_blocks(state.grid.n_points);
        sampler.sample(state, t0);
        for (long step = 0; step < n_steps; ++step) {
            build_w_blocks(t0 + (step + 0.5) * dt, w_blocks, cap);
            cn.assemble(w_blocks, dt);
            cn.step(state.amplitudes);
            if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
                sampler.sample(state, t0 + (step + 1) * dt);
        }
        return sampler.series;
    }

    SplitStepPlan plan(state.grid, state.n_cut, mass, dt, config.absorber);
    Vec fock_half(state.n_cut);
    for (int n = 0; n < state.n_cut; ++n)
        fock_half(n) = std::exp(cd(0.0, -0.5 * dt * spec.omega * n));

    Eigen::MatrixXcd w_phase(state.grid.n_points, state.n_cut);
    int taylor_k = config.taylor_order;
    auto build_w_phase = [&](double t_mid) {
        const double f = envelope_eval(spec.envelope, t_mid).f;
        const double off = shift ? shift(t_mid) : 0.0;
        if (config.coupling == CouplingScheme::taylor) {
            const double alpha_norm = std::abs(spec.ell * f) * std::abs(qvals(state.n_cut - 1));
            const double reach = std::max(std::abs(state.grid.x_min), std::abs(state.grid.x_max));
            while (std::pow(alpha_norm, taylor_k + 1) *
                       potential.derivative_bound(taylor_k + 1, reach) * dt >
                   taylor_remainder_tol) {
                if (taylor_k >= 4)
                    throw stability_error(
                        "Taylor coupling remainder exceeds 1e-8 per step at order 4; use the exact "
                        "eigenbasis coupling or reduce dt");
                taylor_k = 4;
            }
        }
        for (int k = 0; k < state.n_cut; ++k) {
            const double s = spec.ell * f * qvals(k);
            for (int g = 0; g < state.grid.n_points; ++g) {
                const double x = state.grid.x(g);
                const double v = config.coupling == CouplingScheme::exact_eigenbasis
                                     ? potential.value(x - off - s)
                                     : taylor_potential(potential, x - off, s, taylor_k);
                w_phase(g, k) = std::exp(cd(-0.5 * dt * plan.cap[g], -0.5 * dt * v));
            }
        }
    };

    sampler.sample(state, t0);
    for (long step = 0; step < n_steps; ++step) {
        build_w_phase(t0 + (step + 0.5) * dt);
        state.amplitudes.array().rowwise() *= fock_half.transpose().array();
        rotate_in(state.amplitudes, vq);
        state.amplitudes.array() *= w_phase.array();
        rotate_out(state.amplitudes, vq);
        plan.apply_kinetic(state.amplitudes);
        rotate_in(state.amplitudes, vq);
        state.amplitudes.array() *= w_phase.array();
        rotate_out(state.amplitudes, vq);
        state.amplitudes.array().rowwise() *= fock_half.transpose().array();
        if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
            sampler.sample(state, t0 + (step + 1) * dt);
    }
    return sampler.series;
}

// ---------------------------------------------------------------------------
// Transformed frame

ObservableSeries evolve_final(CompositeState& state, const PotentialSpec& potential,
                              const DriveSpec& spec, int order, const PropagatorConfig& config,
                              double t0, double t1, std::optional<TrapRegion> region) {
    potential.validate();
    spec.validate();
    config.validate();
    const long n_steps = step_count(t0, t1, config);
    const double dt = (t1 - t0) / double(n_steps);
    const double mass = potential.mass;
    const FockSpace fock(state.n_cut);
    const Mat& vq = fock.quadrature_eigen().vectors;
    const Eigen::VectorXd& qvals = fock.quadrature_eigen().values;
    const EffectiveField field(spec, order);

    std::vector<cd> acc(n_steps);
    for (long step = 0; step < n_steps; ++step)
        acc[step] = field.acceleration_coeff(t0 + (step + 0.5) * dt);

    const std::vector<double> vgrid = potential.values(state.grid);
    if (config.stability_audit) audit_phase(dt * max_abs(vgrid), "potential");

    Sampler sampler;
    sampler.region = region;
    sampler.cfg = &config;
    sampler.initial_norm_sq = state.norm_squared();
    Eigen::VectorXd xdiag(state.grid.n_points);
    for (int g = 0; g < state.grid.n_points; ++g) xdiag(g) = state.grid.x(g);
    sampler.energy_fn = [&, xdiag](const CompositeState& s, double t) {
        const double nsq = s.norm_squared();
        OperatorSpec coupling;
        coupling.osc = Mat(mass * field.acceleration_op(fock, t));
        coupling.particle_diag = xdiag;
        return expectation_kinetic(s, mass) + expectation_potential_diag(s, vgrid) +
               expectation(s, coupling).real() / nsq;
    };

    auto build_w_blocks = [&](long step, std::vector<Mat>& w_blocks,
                              const std::vector<double>& cap) {
        const Mat coupling_op = linear_op(fock, acc[step]);
        for (int g = 0; g < state.grid.n_points; ++g) {
            const double x = state.grid.x(g);
            Mat w = mass * x * coupling_op;
            for (int n = 0; n < state.n_cut; ++n) w(n, n) += cd(vgrid[g], -cap[g]);
            w_blocks[g] = w;
        }
    };

    if (config.scheme == Scheme::crank_nicolson) {
        CrankNicolson cn(state.grid, state.n_cut, mass, dt);
        const std::vector<double> cap = cap_profile(state.grid, config.absorber);
        std::vector<Mat> w_blocks(state.grid.n_points);
        sampler.sample(state, t0);
        for (long step = 0; step < n_steps; ++step) {
            build_w_blocks(step, w_blocks, cap);
            cn.assemble(w_blocks, dt);
            cn.step(state.amplitudes);
            if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
                sampler.sample(state, t0 + (step + 1) * dt);
        }
        return sampler.series;
    }

    SplitStepPlan plan(state.grid, state.n_cut, mass, dt, config.absorber);
    Eigen::MatrixXcd w_phase(state.grid.n_points, state.n_cut);
    Mat basis(state.n_cut, state.n_cut);

    sampler.sample(state, t0);
    for (long step = 0; step < n_steps; ++step) {
        const cd c = acc[step];
        const double mag = std::abs(c);
        const double theta = mag > 0.0 ? std::arg(c) : 0.0;
        // c a + c* a† = |c| R Q R† with R = exp(-i theta n).
        basis = vq;
        for (int n = 0; n < state.n_cut; ++n) basis.row(n) *= std::exp(cd(0.0, -theta * n));
        for (int k = 0; k < state.n_cut; ++k)
            for (int g = 0; g < state.grid.n_points; ++g) {
                const double v = vgrid[g] + mass * state.grid.x(g) * mag * qvals(k);
                w_phase(g, k) = std::exp(cd(-0.5 * dt * plan.cap[g], -0.5 * dt * v));
            }
        rotate_in(state.amplitudes, basis);
        state.amplitudes.array() *= w_phase.array();
        rotate_out(state.amplitudes, basis);
        plan.apply_kinetic(state.amplitudes);
        rotate_in(state.amplitudes, basis);
        state.amplitudes.array() *= w_phase.array();
        rotate_out(state.amplitudes, basis);
        if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
            sampler.sample(state, t0 + (step + 1) * dt);
    }
    return sampler.series;
}

// ---------------------------------------------------------------------------
// Mode continuum (static Hamiltonian)

namespace {

// Apply a one-mode matrix on the flattened product Fock index.
void apply_mode_matrix(Eigen::MatrixXcd& a, const std::vector<int>& dims, int mode, const Mat& m) {
    long stride = 1;
    for (int j = 0; j < mode; ++j) stride *= dims[j];
    const int d = dims[mode];
    const long total = a.cols();
    const long outer_count = total / (stride * d);
    Eigen::MatrixXcd fiber(a.rows(), d);
    for (long outer = 0; outer < outer_count; ++outer)
        for (long inner = 0; inner < stride; ++inner) {
            for (int k = 0; k < d; ++k)
                fiber.col(k) = a.col(inner + stride * (k + long(d) * outer));
            fiber = fiber * m.transpose();
            for (int k = 0; k < d; ++k)
                a.col(inner + stride * (k + long(d) * outer)) = fiber.col(k);
        }
}

}  // namespace

ObservableSeries evolve_continuum(CompositeState& state, const PotentialSpec& potential,
                                  const BathSpec& bath, const PropagatorConfig& config, double t0,
                                  double t1, std::optional<TrapRegion> region) {
    potential.validate();
    bath.validate();
    config.validate();
    if (config.scheme == Scheme::crank_nicolson)
        throw validation_error("evolve_continuum: only the spectral scheme is provided");
    if (state.n_cut != bath.total_dim())
        throw validation_error("evolve_continuum: state Fock dimension must equal the bath product");
    if (long(state.grid.n_points) * bath.total_dim() > (1L << 22))
        throw validation_error("evolve_continuum: composite dimension budget (2^22) exceeded");
    const long n_steps = step_count(t0, t1, config);
    const double dt = (t1 - t0) / double(n_steps);
    const double mass = potential.mass;
    const std::vector<int> dims = bath.dims();
    const int n_modes = bath.mode_count();
    const long total = bath.total_dim();

    // Per-mode quadrature eigensystems and the flattened coupling offsets.
    std::vector<Mat> mode_basis(n_modes);
    std::vector<Eigen::VectorXd> mode_q(n_modes);
    for (int m = 0; m < n_modes; ++m) {
        const FockSpace f(dims[m]);
        mode_basis[m] = f.quadrature_eigen().vectors;
        mode_q[m] = f.quadrature_eigen().values;
    }
    std::vector<double> offset(total, 0.0), number_energy(total, 0.0);
    for (long n = 0; n < total; ++n) {
        long rem = n;
        for (int m = 0; m < n_modes; ++m) {
            const int k = int(rem % dims[m]);
            rem /= dims[m];
            offset[n] += bath.modes[m].coupling * mode_q[m](k);
            number_energy[n] += bath.modes[m].omega * k;
        }
    }

    const std::vector<double> vgrid = potential.values(state.grid);
    if (config.stability_audit) audit_phase(dt * max_abs(vgrid), "potential");

    SplitStepPlan plan(state.grid, int(total), mass, dt, config.absorber);

    // Static factor tables.
    Eigen::MatrixXcd w_phase(state.grid.n_points, total);
    Eigen::MatrixXd v_table(state.grid.n_points, total);
    for (long n = 0; n < total; ++n)
        for (int g = 0; g < state.grid.n_points; ++g) {
            const double v = potential.value(state.grid.x(g) - offset[n]);
            v_table(g, n) = v;
            w_phase(g, n) = std::exp(cd(-0.5 * dt * plan.cap[g], -0.5 * dt * v));
        }
    Vec fock_half(total);
    for (long n = 0; n < total; ++n) fock_half(n) = std::exp(cd(0.0, -0.5 * dt * number_energy[n]));

    auto rotate_all_in = [&](Eigen::MatrixXcd& a) {
        for (int m = 0; m < n_modes; ++m) {
            const Mat adj = mode_basis[m].adjoint();
            apply_mode_matrix(a, dims, m, adj);
        }
    };
    auto rotate_all_out = [&](Eigen::MatrixXcd& a) {
        for (int m = 0; m < n_modes; ++m) apply_mode_matrix(a, dims, m, mode_basis[m]);
    };

    Sampler sampler;
    sampler.region = region;
    sampler.cfg = &config;
    sampler.initial_norm_sq = state.norm_squared();
    sampler.energy_fn = [&](const CompositeState& s, double) {
        const double nsq = s.norm_squared();
        Eigen::MatrixXcd rotated = s.amplitudes;
        rotate_all_in(rotated);
        double pot_term = 0.0;
        for (long n = 0; n < total; ++n)
            for (int g = 0; g < s.grid.n_points; ++g)
                pot_term += v_table(g, n) * std::norm(rotated(g, n));
        pot_term *= s.dx();
        double num_term = 0.0;
        for (long n = 0; n < total; ++n)
            num_term += number_energy[n] * s.amplitudes.col(n).squaredNorm();
        num_term *= s.dx();
        return expectation_kinetic(s, mass) + (pot_term + num_term) / nsq;
    };
    sampler.leakage_fn = [&](const CompositeState& s) {
        // Worst per-mode top-level population.
        const double nsq = s.amplitudes.squaredNorm();
        if (nsq == 0.0) return 0.0;
        double worst = 0.0;
        for (int m = 0; m < n_modes; ++m) {
            double pop = 0.0;
            long rem, k;
            long stride = 1;
            for (int j = 0; j < m; ++j) stride *= dims[j];
            for (long n = 0; n < total; ++n) {
                rem = n / stride;
                k = rem % dims[m];
                if (k == dims[m] - 1) pop += s.amplitudes.col(n).squaredNorm();
            }
            worst = std::max(worst, pop / nsq);
        }
        return worst;
    };
    sampler.variance_fn = [&](const CompositeState& s) {
        // Quadrature variances of the first mode's marginal.
        const int d0 = dims[0];
        Mat rho = Mat::Zero(d0, d0);
        for (long rest = 0; rest < total / d0; ++rest)
            for (int r = 0; r < d0; ++r)
                for (int c = 0; c < d0; ++c)
                    rho(r, c) += s.dx() *
                                 s.amplitudes.col(c + long(d0) * rest)
                                     .dot(s.amplitudes.col(r + long(d0) * rest));
        return d0 >= 2 ? quadrature_variances(rho) : QuadratureVariances{0.0, 0.0, 0.0};
    };

    sampler.sample(state, t0);
    for (long step = 0; step < n_steps; ++step) {
        state.amplitudes.array().rowwise() *= fock_half.transpose().array();
        rotate_all_in(state.amplitudes);
        state.amplitudes.array() *= w_phase.array();
        rotate_all_out(state.amplitudes);
        plan.apply_kinetic(state.amplitudes);
        rotate_all_in(state.amplitudes);
        state.amplitudes.array() *= w_phase.array();
        rotate_all_out(state.amplitudes);
        state.amplitudes.array().rowwise() *= fock_half.transpose().array();
        if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
            sampler.sample(state, t0 + (step + 1) * dt);
    }
    return sampler.series;
}

// ---------------------------------------------------------------------------
// Particle-only propagation

ObservableSeries evolve_classical(CompositeState& state, const PotentialSpec& potential,
                                  const PropagatorConfig& config, double t0, double t1,
                                  const ClassicalShift& shift, const ClassicalShift& dipole_field,
                                  std::optional<TrapRegion> region) {
    potential.validate();
    config.validate();
    if (state.n_cut != 1)
        throw validation_error("evolve_classical: particle-only states carry n_cut = 1");
    const long n_steps = step_count(t0, t1, config);
    const double dt = (t1 - t0) / double(n_steps);
    const double mass = potential.mass;

    const std::vector<double> vgrid = potential.values(state.grid);
    if (config.stability_audit) audit_phase(dt * max_abs(vgrid), "potential");

    Sampler sampler;
    sampler.region = region;
    sampler.cfg = &config;
    sampler.initial_norm_sq = state.norm_squared();
    sampler.energy_fn = [&](const CompositeState& s, double t) {
        const double off = shift ? shift(t) : 0.0;
        const double field = dipole_field ? dipole_field(t) : 0.0;
        double pot_term = 0.0;
        for (int g = 0; g < s.grid.n_points; ++g) {
            const double x = s.grid.x(g);
            pot_term += (potential.value(x - off) + mass * x * field) *
                        std::norm(s.amplitudes(g, 0));
        }
        pot_term *= s.dx();
        return expectation_kinetic(s, mass) + pot_term / s.norm_squared();
    };

    auto v_at = [&](double t_mid, int g) {
        const double off = shift ? shift(t_mid) : 0.0;
        const double field = dipole_field ? dipole_field(t_mid) : 0.0;
        const double x = state.grid.x(g);
        return potential.value(x - off) + mass * x * field;
    };

    if (config.scheme == Scheme::crank_nicolson) {
        CrankNicolson cn(state.grid, 1, mass, dt);
        const std::vector<double> cap = cap_profile(state.grid, config.absorber);
        std::vector<Mat> w_blocks(state.grid.n_points, Mat(1, 1));
        sampler.sample(state, t0);
        for (long step = 0; step < n_steps; ++step) {
            const double t_mid = t0 + (step + 0.5) * dt;
            for (int g = 0; g < state.grid.n_points; ++g)
                w_blocks[g](0, 0) = cd(v_at(t_mid, g), -cap[g]);
            cn.assemble(w_blocks, dt);
            cn.step(state.amplitudes);
            if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
                sampler.sample(state, t0 + (step + 1) * dt);
        }
        return sampler.series;
    }

    SplitStepPlan plan(state.grid, 1, mass, dt, config.absorber);
    Eigen::VectorXcd w_phase(state.grid.n_points);
    sampler.sample(state, t0);
    for (long step = 0; step < n_steps; ++step) {
        const double t_mid = t0 + (step + 0.5) * dt;
        for (int g = 0; g < state.grid.n_points; ++g)
            w_phase(g) = std::exp(cd(-0.5 * dt * plan.cap[g], -0.5 * dt * v_at(t_mid, g)));
        state.amplitudes.col(0).array() *= w_phase.array();
        plan.apply_kinetic(state.amplitudes);
        state.amplitudes.col(0).array() *= w_phase.array();
        if ((step + 1) % config.sample_every == 0 || step + 1 == n_steps)
            sampler.sample(state, t0 + (step + 1) * dt);
    }
    return sampler.series;
}

}  // namespace qkh
