#include "qkh/kernel.hpp"

#include <cmath>

#include "qkh/constants.hpp"

namespace qkh {

cd f_kernel_exact(const DriveSpec& spec, double t_prime, double t) {
    const cd cp = alpha_i_dot_coeff(spec, t_prime);
    const cd ct = alpha_i_dot_coeff(spec, t);
    return cp * std::conj(ct) - std::conj(cp) * ct;
}

cd f_kernel_exact_dt(const DriveSpec& spec, double t_prime, double t) {
    const cd cp = alpha_i_dot_coeff(spec, t_prime);
    const cd dct = alpha_i_ddot_coeff(spec, t);
    return cp * std::conj(dct) - std::conj(cp) * dct;
}

cd f_kernel_single_mode(const DriveSpec& spec, double t_prime, double t) {
    if (spec.omega * spec.envelope.time_scale() < slow_envelope_min_omega_T)
        throw validation_error(
            "f_kernel_single_mode: closed form holds in the slow-envelope regime (omega*T >= 10); "
            "use f_kernel_bruteforce for fast envelopes");
    const double fp = envelope_eval(spec.envelope, t_prime).f;
    const double ft = envelope_eval(spec.envelope, t).f;
    const double w = spec.omega;
    return cd(0.0, -2.0 * spec.ell * spec.ell * fp * ft * w * w * std::sin(w * (t_prime - t)));
}

BruteForceKernel f_kernel_bruteforce(const DriveSpec& spec, double t_prime, double t, int n_cut) {
    if (n_cut < 8) throw validation_error("f_kernel_bruteforce: n_cut must be >= 8");
    const FockSpace fock(n_cut);
    const Mat op_p = alpha_i_dot(spec, fock, t_prime);
    const Mat op_t = alpha_i_dot(spec, fock, t);
    const Mat comm = op_p * op_t - op_t * op_p;
    // Linear-operator products leave the truncation defect on the top level only.
    const IdentityComponent id = identity_component(comm, 1);
    return {id.scalar, id.defect};
}

KernelTable tabulate_kernel(const DriveSpec& spec, double t_start, double t_end, int n_times) {
    if (n_times < 2) throw validation_error("tabulate_kernel: need at least two times");
    KernelTable table;
    table.times.resize(n_times);
    for (int i = 0; i < n_times; ++i)
        table.times[i] = t_start + (t_end - t_start) * i / (n_times - 1);
    table.im_f.resize(std::size_t(n_times) * n_times);
    for (int i = 0; i < n_times; ++i)
        for (int j = 0; j < n_times; ++j)
            table.im_f[std::size_t(i) * n_times + j] =
                f_kernel_exact(spec, table.times[i], table.times[j]).imag();
    return table;
}

}  // namespace qkh
