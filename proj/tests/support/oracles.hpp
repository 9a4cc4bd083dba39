// oracles.hpp — Independent test-side oracles. Everything here recomputes
// expected values by a route different from the implementation under test:
// dense matrix algebra, stepwise unitary products, classical ODE integration,
// symplectic covariance flows, and plain series sums.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qkh/drive.hpp"
#include "qkh/envelope.hpp"

namespace qkh::oracle {

// Stepwise squeeze-stage conjugation U v(t) U† with
// U = prod_j exp(sign * i * (dt/2) * v(t_j)^2), midpoint-sampled and
// Richardson-extrapolated from n_steps and 2 n_steps.
Mat conjugated_velocity(const DriveSpec& spec, int n_cut, double t0, double t, long n_steps,
                        double sign);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Mean occupation of a truncated, renormalized coherent state by direct
// Poisson summation.
double coherent_mean_occupation(double beta_abs, int n_cut);

// Covariance matrix (Var X, Var P, Cov) after evolving vacuum under the
// quadratic Hamiltonian H(t) = -sign * m/2 * v(t)^2 by an RK4 symplectic-flow
// integration of d(sigma)/dt = (Omega G) sigma + sigma (Omega G)^T.
struct Covariance {
    double var_x;
    double var_p;
    double cov;
};
Covariance squeeze_covariance(const DriveSpec& spec, double t0, double t, long n_steps, double sign,
                              double mass = 1.0);

// Classical trajectory of a particle in a (possibly shaken) potential with an
// optional dipole field: m xdd = -V'(x - shift(t)) - m field(t), RK4.
struct ClassicalPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> p;
};
ClassicalPath classical_trajectory(const std::function<double(double)>& dV,
                                   const std::function<double(double)>& shift,
                                   const std::function<double(double)>& field, double mass,
                                   double x0, double p0, double t0, double t1, long n_steps);

// Width of a freely spreading gaussian packet, sigma(t)^2 = s0^2 + (t/(2 m s0))^2.
double free_spread_sigma_sq(double sigma0, double mass, double t);

}  // namespace qkh::oracle
