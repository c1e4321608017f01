#pragma once

// Independent reference computations used by the tests.  Everything here goes
// through generic numerical quadrature / brute-force enumeration, never
// through the closed forms under test.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "wavekin/gaussian.hpp"
#include "wavekin/quadrature.hpp"

namespace oracles {

using wavekin::cd;
using wavekin::ComplexGaussian;
using wavekin::cvec2;
using wavekin::WavePacketSum;

// integration half-width that captures the 1-D factor e^{-z x^2 + l x} to
// ~1e-26 of its peak
inline std::pair<double, double> axis_box(cd z, cd l) {
    const double zr = z.real();
    const double center = l.real() / (2.0 * zr);
    const double w = std::sqrt(60.0 / zr) + 1.0;
    return {center - w, center + w};
}

// \int_R e^{-z x^2 + l x} dx by adaptive quadrature
inline cd line_integral(cd z, cd l, double tol = 1e-12) {
    auto [a, b] = axis_box(z, l);
    return wavekin::integrate_gk(
        [&](double x) { return std::exp(-z * x * x + l * x); }, a, b, 1e-15, tol, 52);
}

// \int_{R^2} f dx: the integrand factorizes over the axes
inline cd plane_integral(const ComplexGaussian& f, double tol = 1e-12) {
    return std::exp(f.log_amp) * line_integral(f.quad, f.lin[0], tol) *
           line_integral(f.quad, f.lin[1], tol);
}

// \int f(x) e^{-ik.x} dx
inline cd fourier_point(const ComplexGaussian& f, double k1, double k2,
                        double tol = 1e-12) {
    ComplexGaussian g = f;
    g.lin[0] -= cd(0.0, k1);
    g.lin[1] -= cd(0.0, k2);
    return plane_integral(g, tol);
}

// (e^{itD}f)(x) = (2pi)^-2 \int fhat(k) e^{-it|k|^2} e^{ik.x} dk with fhat
// from the (independently verified) closed form
inline cd propagate_point(const ComplexGaussian& f, double t, double x1, double x2) {
    const ComplexGaussian fh = wavekin::fourier_transform(f);
    ComplexGaussian g = fh;
    g.quad += cd(0.0, t);
    g.lin[0] += cd(0.0, x1);
    g.lin[1] += cd(0.0, x2);
    return plane_integral(g) / (wavekin::kTwoPi * wavekin::kTwoPi);
}

// nested adaptive 2-D quadrature of an arbitrary integrand over a box
inline cd box_integral2d(const std::function<cd(double, double)>& f, double ax,
                         double bx, double ay, double by, double tol = 1e-9) {
    return wavekin::integrate_gk(
        [&](double x) {
            return wavekin::integrate_gk([&](double y) { return f(x, y); }, ay, by,
                                         1e-14, 0.1 * tol, 44);
        },
        ax, bx, 1e-14, tol, 44);
}

// random integrable Gaussian with moderate coefficients
inline ComplexGaussian random_gaussian(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexGaussian g;
    g.quad = cd(0.3 + 1.5 * std::abs(u(rng)), 1.2 * u(rng));
    g.lin = {cd(u(rng), 2.0 * u(rng)), cd(u(rng), 2.0 * u(rng))};
    g.log_amp = cd(u(rng), 2.0 * u(rng));
    return g;
}

}  // namespace oracles
