// quadrature.hpp — Adaptive panel quadrature for the oscillatory kernel
// integrals. A nested Gauss pair (7/15 points) supplies the error estimate;
// panels are pre-split per oscillation period so the adaptivity never has to
// discover the carrier frequency on its own.

#pragma once

#include <complex>
#include <functional>

namespace qkh {

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_floor = 1e-14;   // below this magnitude the relative test is waived
    int max_depth = 24;         // bisection depth per panel
    double split_period = 0.0;  // >0: pre-split [a,b] into half-period panels
};

// Integrate a complex-valued scalar function over [a, b].
std::complex<double> integrate(const std::function<std::complex<double>(double)>& f, double a,
                               double b, const QuadratureOptions& opts = {});

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const QuadratureOptions& opts = {});

namespace detail {
// Gauss-Legendre nodes/weights on [-1, 1], generated by Newton iteration.
void gauss_legendre(int n, double* nodes, double* weights);
}  // namespace detail

}  // namespace qkh
