// kernel.hpp — The c-number commutator kernel F(t', t) of the
// interaction-picture trap-velocity operators, in closed form and as a
// brute-force matrix computation on the truncated space.
//
// Sign convention: F is fixed by the canonical ladder algebra,
//   F(t', t) = c(t') conj(c(t)) - conj(c(t')) c(t),
// with c the a-coefficient of the velocity operator. In the slow-envelope
// regime this evaluates to -2i ell^2 f(t') f(t) w^2 sin[w (t' - t)]; the
// pure-imaginary scalar is antisymmetric under t' <-> t.

#pragma once

#include <vector>

#include "qkh/drive.hpp"

namespace qkh {

// Exact kernel from the closed-form coefficients; valid for every envelope and
// for either slow-envelope setting of the drive.
cd f_kernel_exact(const DriveSpec& spec, double t_prime, double t);

// Partial derivative of the exact kernel with respect to the second time.
cd f_kernel_exact_dt(const DriveSpec& spec, double t_prime, double t);

// Slow-envelope closed form. Requires omega * T >= 10; otherwise throws a
// validation error directing the caller to f_kernel_bruteforce.
cd f_kernel_single_mode(const DriveSpec& spec, double t_prime, double t);

// Matrix commutator on the truncated space, decomposed into its interior
// identity component and the off-identity defect norm.
struct BruteForceKernel {
    cd scalar;
    double c_number_defect;
};
BruteForceKernel f_kernel_bruteforce(const DriveSpec& spec, double t_prime, double t, int n_cut);

// Tabulated Im F over a (t', t) grid, exportable as CSV.
struct KernelTable {
    std::vector<double> times;
    std::vector<double> im_f;  // row-major over (t' index, t index)
};
KernelTable tabulate_kernel(const DriveSpec& spec, double t_start, double t_end, int n_times);

}  // namespace qkh
