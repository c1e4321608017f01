#include "wavekin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/quadrature.hpp"

namespace wavekin {

namespace {

struct Interval {
    double lo = 0, hi = -1;
    bool empty() const { return !(lo < hi); }
};

Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// { nu : cpar^2 + (cperp + nu)^2 <= R^2 }
Interval nu_interval(double cpar, double cperp, double R) {
    const double s2 = R * R - cpar * cpar;
    if (s2 <= 0.0) return {};
    const double s = std::sqrt(s2);
    return {-cperp - s, -cperp + s};
}

}  // namespace

cd chart_integral(double k1, double k2, double xi, double Ru, double Rv, double Rw,
                  const std::function<cd(double, double, double, double)>& F,
                  const ChartOptions& opt) {
    const double kn = std::hypot(k1, k2);
    const double rmax = kn + Ru;
    double rmin = 0.0;
    if (xi != 0.0) {
        // |b| >= |xi|/(2r) must fit inside the v-support ball
        rmin = std::abs(xi) / (2.0 * (kn + Rv));
    }
    if (!(rmin < rmax)) return {0.0, 0.0};

    auto integrand_theta = [&](double theta) -> cd {
        const double ux = std::cos(theta), uy = std::sin(theta);
        const double px = -uy, py = ux;  // unit perp
        // radial window from |k + r u| <= Ru
        const double ku = k1 * ux + k2 * uy;
        const double disc = ku * ku - (kn * kn - Ru * Ru);
        if (disc <= 0.0) return cd(0.0, 0.0);
        Interval rint = intersect({-ku - std::sqrt(disc), -ku + std::sqrt(disc)},
                                  {rmin, rmax});
        if (rint.empty()) return cd(0.0, 0.0);

        auto integrand_r = [&](double r) -> cd {
            const double p = xi == 0.0 ? 0.0 : xi / (2.0 * r);
            // c  = k + p u   (center of the b constraint)
            // c' = k + (r+p) u  (center of the a+b constraint)
            const double c_par = ku + p;        // component along u
            const double c_perp = k1 * px + k2 * py;
            Interval nu = intersect(nu_interval(c_par, c_perp, Rv),
                                    nu_interval(c_par + r, c_perp, Rw));
            if (nu.empty()) return cd(0.0, 0.0);
            auto integrand_nu = [&](double v) -> cd {
                const double bx = p * ux + v * px, by = p * uy + v * py;
                return F(r * ux, r * uy, bx, by);
            };
            return integrate_gk(integrand_nu, nu.lo, nu.hi, opt.abs_tol,
                                0.1 * opt.rel_tol, 36);
        };
        return integrate_gk(integrand_r, rint.lo, rint.hi, opt.abs_tol,
                            0.3 * opt.rel_tol, 36);
    };
    const cd raw = integrate_gk(integrand_theta, 0.0, kTwoPi, opt.abs_tol,
                                opt.rel_tol, 36);
    return 0.5 * raw;
}

cd cr_operator(const SpectralProfile& u, const SpectralProfile& v,
               const SpectralProfile& w, double k1, double k2,
               const ChartOptions& opt) {
    auto F = [&](double ax, double ay, double bx, double by) -> cd {
        const double f1 = u(k1 + ax, k2 + ay);
        if (f1 == 0.0) return cd(0.0, 0.0);
        const double f2 = v(k1 + bx, k2 + by);
        if (f2 == 0.0) return cd(0.0, 0.0);
        return cd(f1 * f2 * w(k1 + ax + bx, k2 + ay + by), 0.0);
    };
    return chart_integral(k1, k2, 0.0, u.support_radius, v.support_radius,
                          w.support_radius, F, opt);
}

KineticProfile khat_profile(const SpectralProfile& u, const SpectralProfile& v,
                            const SpectralProfile& w, double k1, double k2,
                            const std::vector<double>& xi_grid, bool times_2pi,
                            const ChartOptions& opt) {
    KineticProfile out;
    out.xi = xi_grid;
    out.times_2pi = times_2pi;
    out.value.reserve(xi_grid.size());
    auto F = [&](double ax, double ay, double bx, double by) -> cd {
        return cd(u(k1 + ax, k2 + ay) * v(k1 + bx, k2 + by) *
                      w(k1 + ax + bx, k2 + ay + by),
                  0.0);
    };
    for (double xi : xi_grid) {
        cd val = chart_integral(k1, k2, xi, u.support_radius, v.support_radius,
                                w.support_radius, F, opt);
        if (times_2pi) val *= kTwoPi;
        out.value.push_back(val);
    }
    return out;
}

double wk_operator(const SpectralProfile& n, double k1, double k2,
                   const ChartOptions& opt) {
    const double n0 = n(k1, k2);
    auto F = [&](double ax, double ay, double bx, double by) -> cd {
        const double v1 = n(k1 + ax, k2 + ay);
        const double v3 = n(k1 + bx, k2 + by);
        const double v2 = n(k1 + ax + bx, k2 + ay + by);
        return cd(v1 * v2 * v3 - n0 * v2 * v3 + n0 * v1 * v3 - n0 * v1 * v2, 0.0);
    };
    const double R = n.support_radius;
    return chart_integral(k1, k2, 0.0, R, R, R, F, opt).real();
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 3 matched samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("CubicSpline: x not increasing");
    // natural spline: tridiagonal solve for second derivatives
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    m_.assign(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        a[i] = h0;
        b[i] = 2.0 * (h0 + h1);
        c[i] = h1;
        d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

double CubicSpline::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = static_cast<std::size_t>(
        std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1);
    const double h = x_[i + 1] - x_[i], t = x - x_[i];
    return y_[i] + t * ((y_[i + 1] - y_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1])) +
           t * t * (0.5 * m_[i]) + t * t * t * ((m_[i + 1] - m_[i]) / (6.0 * h));
}

double CubicSpline::derivative(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) x = x_.front();
    if (x >= x_.back()) x = x_.back();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    if (i > 0) --i;
    if (i + 1 >= n) i = n - 2;
    const double h = x_[i + 1] - x_[i], t = x - x_[i];
    return (y_[i + 1] - y_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1]) +
           t * m_[i] + t * t * ((m_[i + 1] - m_[i]) / (2.0 * h));
}

namespace {

// (1 - e^{-i t xi}) / (i xi), stable near xi = 0
cd duhamel_kernel(double t, double xi) {
    const double x = t * xi;
    if (std::abs(x) < 1e-5) {
        const cd f = cd(1.0 - x * x / 6.0, -x / 2.0 + x * x * x / 24.0);
        return t * f;
    }
    return (1.0 - std::exp(cd(0.0, -x))) / cd(0.0, xi);
}

// composite Simpson of f over the profile range, with enough substeps per
// spline cell to resolve e^{i t xi}
cd integrate_profile(const KineticProfile& p, double t,
                     const std::function<cd(double)>& f) {
    KahanComplex acc;
    for (std::size_t i = 0; i + 1 < p.xi.size(); ++i) {
        const double a = p.xi[i], b = p.xi[i + 1];
        int nsub = std::max(8, static_cast<int>(std::ceil(std::abs(t) * (b - a) / 0.25)));
        if (nsub % 2) ++nsub;
        const double h = (b - a) / nsub;
        cd s = f(a) + f(b);
        for (int j = 1; j < nsub; ++j)
            s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
        acc += s * (h / 3.0);
    }
    return acc.value();
}

}  // namespace

PvResult pv_limit(const KineticProfile& profile, double t) {
    const std::size_t n = profile.xi.size();
    if (n < 3) throw std::invalid_argument("pv_limit: profile too short");
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = profile.value[i].real();
        im[i] = profile.value[i].imag();
    }
    const CubicSpline sre(profile.xi, re), sim(profile.xi, im);
    auto S = [&](double xi) { return cd(sre(xi), sim(xi)); };

    PvResult out;
    out.finite_t = integrate_profile(profile, t,
                                     [&](double xi) { return duhamel_kernel(t, xi) * S(xi); });

    const cd S0 = S(0.0);
    const cd dS0 = cd(sre.derivative(0.0), sim.derivative(0.0));
    auto pv_integrand = [&](double xi) -> cd {
        if (std::abs(xi) < 1e-9) return dS0 / cd(0.0, 1.0);
        return (S(xi) - S0) / cd(0.0, xi);
    };
    // over [a, b] the subtracted S(0)/(i xi) piece leaves a log of the
    // endpoint ratio; without it the limit only matches t -> infinity on
    // symmetric intervals
    const double a = profile.xi.front(), b = profile.xi.back();
    if (!(a < 0.0 && b > 0.0))
        throw std::invalid_argument("pv_limit: profile must straddle xi = 0");
    out.limit = kPi * S0 + S0 * std::log(b / -a) / cd(0.0, 1.0) +
                integrate_profile(profile, 0.0, pv_integrand);
    return out;
}

cd profile_time_signal(const KineticProfile& profile, double t) {
    const std::size_t n = profile.xi.size();
    if (n < 3) throw std::invalid_argument("profile_time_signal: profile too short");
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = profile.value[i].real();
        im[i] = profile.value[i].imag();
    }
    const CubicSpline sre(profile.xi, re), sim(profile.xi, im);
    return integrate_profile(profile, t, [&](double xi) {
        return std::exp(cd(0.0, t * xi)) * cd(sre(xi), sim(xi));
    });
}

}  // namespace wavekin
