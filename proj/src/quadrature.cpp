#include "qkh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qkh/constants.hpp"
#include "qkh/errors.hpp"

namespace qkh {

namespace detail {

void gauss_legendre(int n, double* nodes, double* weights) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

struct GaussPair {
    static constexpr int n_lo = 7;
    static constexpr int n_hi = 15;
    double x_lo[7], w_lo[7];
    double x_hi[15], w_hi[15];
    GaussPair() {
        gauss_legendre(n_lo, x_lo, w_lo);
        gauss_legendre(n_hi, x_hi, w_hi);
    }
};

const GaussPair& gauss_pair() {
    static const GaussPair gp;
    return gp;
}

using cfun = std::function<std::complex<double>(double)>;

std::complex<double> panel(const cfun& f, double a, double b, std::complex<double>& coarse) {
    const GaussPair& gp = gauss_pair();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::complex<double> lo = 0.0, hi = 0.0;
    for (int i = 0; i < GaussPair::n_lo; ++i) lo += gp.w_lo[i] * f(mid + half * gp.x_lo[i]);
    for (int i = 0; i < GaussPair::n_hi; ++i) hi += gp.w_hi[i] * f(mid + half * gp.x_hi[i]);
    coarse = lo * half;
    return hi * half;
}

std::complex<double> adapt(const cfun& f, double a, double b, double tol_abs, int depth,
                           int max_depth) {
    std::complex<double> coarse;
    const std::complex<double> fine = panel(f, a, b, coarse);
    const double err = std::abs(fine - coarse);
    if (err <= tol_abs || depth >= max_depth) {
        if (err > tol_abs)
            throw accuracy_error("quadrature: panel failed to converge at max bisection depth");
        return fine;
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol_abs, depth + 1, max_depth) +
           adapt(f, mid, b, 0.5 * tol_abs, depth + 1, max_depth);
}

}  // namespace detail

std::complex<double> integrate(const std::function<std::complex<double>(double)>& f, double a,
                               double b, const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> edges{a};
    if (opts.split_period > 0.0) {
        const double panel_width = 0.5 * opts.split_period;
        const int n_panels = std::max(1, int(std::ceil((b - a) / panel_width)));
        for (int i = 1; i < n_panels; ++i) edges.push_back(a + (b - a) * i / n_panels);
    }
    edges.push_back(b);

    // A rough pass with the fine rule sets the magnitude scale the relative
    // tolerance is taken against. Panel magnitudes are summed so oscillatory
    // integrands that cancel to zero still get a sensible function scale.
    double scale = opts.abs_floor;
    {
        double rough = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            std::complex<double> coarse;
            rough += std::abs(detail::panel(f, edges[i], edges[i + 1], coarse));
        }
        scale = std::max(scale, rough);
    }

    const double tol_abs = std::max(opts.abs_floor, opts.rel_tol * scale);
    std::complex<double> total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += detail::adapt(f, edges[i], edges[i + 1], tol_abs / double(edges.size() - 1), 0,
                               opts.max_depth);
    return sign * total;
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const QuadratureOptions& opts) {
    return integrate([&](double t) { return std::complex<double>(f(t), 0.0); }, a, b, opts).real();
}

}  // namespace qkh
