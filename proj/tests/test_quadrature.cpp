#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkh/constants.hpp"
#include "qkh/errors.hpp"
#include "qkh/quadrature.hpp"

using namespace qkh;

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    double x7[7], w7[7], x15[15], w15[15];
    detail::gauss_legendre(7, x7, w7);
    detail::gauss_legendre(15, x15, w15);

    auto moment = [](int n, const double* x, const double* w, int power) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += w[i] * std::pow(x[i], power);
        return acc;
    };
    // Exact moments over [-1, 1]: 0 for odd, 2/(k+1) for even.
    for (int k = 0; k <= 13; ++k) {
        const double expected = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        CHECK(moment(7, x7, w7, k) == doctest::Approx(expected).epsilon(1e-13).scale(1.0));
    }
    for (int k = 0; k <= 29; ++k) {
        const double expected = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        CHECK(moment(15, x15, w15, k) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("polynomial and oscillatory integrals") {
    CHECK(integrate_real([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    QuadratureOptions opts;
    opts.split_period = two_pi;
    CHECK(std::abs(integrate_real([](double x) { return std::sin(x); }, 0.0, 20.0 * pi, opts)) <
          1e-9);

    const double T = 37.3;
    const cd expected = (std::exp(cd(0.0, T)) - 1.0) / cd(0.0, 1.0);
    const cd got = integrate([](double x) { return std::exp(cd(0.0, x)); }, 0.0, T, opts);
    CHECK(std::abs(got - expected) < 1e-10);
}

TEST_CASE("reversed bounds flip the sign") {
    const double fwd = integrate_real([](double x) { return std::cos(x); }, 0.0, 1.5);
    const double rev = integrate_real([](double x) { return std::cos(x); }, 1.5, 0.0);
    CHECK(fwd == doctest::Approx(-rev).epsilon(1e-14));
    CHECK(integrate_real([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("non-convergence raises an accuracy error") {
    QuadratureOptions opts;
    opts.rel_tol = 1e-14;
    opts.max_depth = 2;
    // |x|^0.1 has an unresolvable cusp at this depth.
    CHECK_THROWS_AS(
        integrate_real([](double x) { return std::pow(std::abs(x), 0.1); }, -1.0, 1.0, opts),
        accuracy_error);
}
