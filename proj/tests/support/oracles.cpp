#include "support/oracles.hpp"

#include <cmath>

namespace qkh::oracle {

namespace {

Mat conjugation_product(const DriveSpec& spec, const FockSpace& fock, double t0, double t,
                        long n_steps, double sign) {
    const double dt = (t - t0) / double(n_steps);
    Mat u = Mat::Identity(fock.n_cut, fock.n_cut);
    for (long j = 0; j < n_steps; ++j) {
        const double tj = t0 + (j + 0.5) * dt;
        const Mat v = alpha_i_dot(spec, fock, tj);
        const HermitianEigen eig = hermitian_eigen(v);
        Vec phases(fock.n_cut);
        for (int k = 0; k < fock.n_cut; ++k) {
            const double lam = eig.values(k);
            phases(k) = std::exp(cd(0.0, sign * 0.5 * dt * lam * lam));
        }
        // Later times multiply from the left.
        u = (eig.vectors * phases.asDiagonal() * eig.vectors.adjoint()) * u;
    }
    const Mat v_t = alpha_i_dot(spec, fock, t);
    return u * v_t * u.adjoint();
}

}  // namespace

Mat conjugated_velocity(const DriveSpec& spec, int n_cut, double t0, double t, long n_steps,
                        double sign) {
    const FockSpace fock(n_cut);
    const Mat coarse = conjugation_product(spec, fock, t0, t, n_steps, sign);
    const Mat fine = conjugation_product(spec, fock, t0, t, 2 * n_steps, sign);
    // Midpoint product converges at second order; Richardson removes the
    // leading dt^2 term.
    return (4.0 * fine - coarse) / 3.0;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double coherent_mean_occupation(double beta_abs, int n_cut) {
    long double weight = std::exp(-(long double)(beta_abs * beta_abs));
    long double total = 0.0L, weighted = 0.0L;
    for (int n = 0; n < n_cut; ++n) {
        total += weight;
        weighted += n * weight;
        weight *= (long double)(beta_abs * beta_abs) / (n + 1);
    }
    return double(weighted / total);
}

Covariance squeeze_covariance(const DriveSpec& spec, double t0, double t, long n_steps, double sign,
                              double mass) {
    Eigen::Matrix2d sigma;
    sigma << 0.5, 0.0, 0.0, 0.5;
    const double dt = (t - t0) / double(n_steps);
    const Eigen::Matrix2d omega_sym = (Eigen::Matrix2d() << 0.0, 1.0, -1.0, 0.0).finished();

    auto flow = [&](double time, const Eigen::Matrix2d& s) {
        // v(t) = sqrt(2) (Re c X - Im c P); H = -sign m v^2 / 2.
        const cd c = alpha_i_dot_coeff(spec, time);
        Eigen::Vector2d v;
        v << c.real(), -c.imag();
        const Eigen::Matrix2d g = -sign * mass * 2.0 * (v * v.transpose());
        const Eigen::Matrix2d a = omega_sym * g;
        return Eigen::Matrix2d(a * s + s * a.transpose());
    };

    for (long j = 0; j < n_steps; ++j) {
        const double tj = t0 + j * dt;
        const Eigen::Matrix2d k1 = flow(tj, sigma);
        const Eigen::Matrix2d k2 = flow(tj + 0.5 * dt, sigma + 0.5 * dt * k1);
        const Eigen::Matrix2d k3 = flow(tj + 0.5 * dt, sigma + 0.5 * dt * k2);
        const Eigen::Matrix2d k4 = flow(tj + dt, sigma + dt * k3);
        sigma += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {sigma(0, 0), sigma(1, 1), sigma(0, 1)};
}

ClassicalPath classical_trajectory(const std::function<double(double)>& dV,
                                   const std::function<double(double)>& shift,
                                   const std::function<double(double)>& field, double mass,
                                   double x0, double p0, double t0, double t1, long n_steps) {
    ClassicalPath path;
    const double dt = (t1 - t0) / double(n_steps);
    double x = x0, p = p0;
    auto acc = [&](double time, double pos) {
        const double s = shift ? shift(time) : 0.0;
        const double f = field ? field(time) : 0.0;
        return (-dV(pos - s)) / mass - f;
    };
    path.t.push_back(t0);
    path.x.push_back(x);
    path.p.push_back(p);
    for (long j = 0; j < n_steps; ++j) {
        const double tj = t0 + j * dt;
        const double k1x = p / mass, k1p = mass * acc(tj, x);
        const double k2x = (p + 0.5 * dt * k1p) / mass,
                     k2p = mass * acc(tj + 0.5 * dt, x + 0.5 * dt * k1x);
        const double k3x = (p + 0.5 * dt * k2p) / mass,
                     k3p = mass * acc(tj + 0.5 * dt, x + 0.5 * dt * k2x);
        const double k4x = (p + dt * k3p) / mass, k4p = mass * acc(tj + dt, x + dt * k3x);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        path.t.push_back(tj + dt);
        path.x.push_back(x);
        path.p.push_back(p);
    }
    return path;
}

double free_spread_sigma_sq(double sigma0, double mass, double t) {
    const double rate = t / (2.0 * mass * sigma0);
    return sigma0 * sigma0 + rate * rate;
}

}  // namespace qkh::oracle
