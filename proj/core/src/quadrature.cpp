#include "wavekin/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {

// Gauss-Kronrod 7/15 nodes/weights on [-1,1] (positive half; node 0 included)
const double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
const double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
const double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Estimate {
    std::complex<double> kronrod;
    double err;
};

template <class F>
Estimate gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::complex<double> fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    std::complex<double> kr = kWgk[7] * fv[7];
    std::complex<double> gs = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kr += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gs += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    Estimate e;
    e.kronrod = h * kr;
    e.err = std::abs(h * (kr - gs));
    return e;
}

template <class F>
std::complex<double> adapt(const F& f, double a, double b, double abs_tol,
                           double rel_tol, int depth, double whole_scale) {
    Estimate e = gk15(f, a, b);
    const double tol = abs_tol + rel_tol * whole_scale;
    if (e.err <= tol || e.err <= 1e-16 * std::abs(e.kronrod)) return e.kronrod;
    if (depth <= 0)
        throw std::runtime_error("integrate_gk: subdivision limit reached");
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, whole_scale) +
           adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, whole_scale);
}

}  // namespace

std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double abs_tol, double rel_tol,
                                  int max_depth) {
    if (a == b) return {0.0, 0.0};
    Estimate first = gk15(f, a, b);
    const double scale = std::abs(first.kronrod);
    if (first.err <= abs_tol + rel_tol * scale) return first.kronrod;
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * abs_tol, rel_tol, max_depth, scale) +
           adapt(f, m, b, 0.5 * abs_tol, rel_tol, max_depth, scale);
}

double integrate_gk_real(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, double rel_tol, int max_depth) {
    return integrate_gk([&](double x) { return std::complex<double>(f(x), 0.0); }, a,
                        b, abs_tol, rel_tol, max_depth)
        .real();
}

}  // namespace wavekin
