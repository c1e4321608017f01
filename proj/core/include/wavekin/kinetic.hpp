#pragma once

#include <functional>
#include <vector>

#include "wavekin/lattice.hpp"

namespace wavekin {

// tolerance knobs for the nested chart quadrature
struct ChartOptions {
    double rel_tol = 1e-7;
    double abs_tol = 1e-13;
};

// Integral over the microcanonical set
//   S_k(xi) = { (a,b) in R^4 : 2 a.b = xi }
// of F(a,b) dS, in the chart b = (xi/(2|a|^2)) a + (nu/|a|) a_perp with
// chart weight 1/(2|a|); polar coordinates in a keep the weight bounded.
// Slot support radii clip the (theta, r, nu) box: F is assumed to vanish
// unless |k+a|<=Ru, |k+b|<=Rv, |k+a+b|<=Rw.
cd chart_integral(double k1, double k2, double xi, double Ru, double Rv, double Rw,
                  const std::function<cd(double, double, double, double)>& F,
                  const ChartOptions& opt = {});

// T_k(u,v,w) = \int_{S_k(0)} u(k+a) conj(v(k+b)) w(k+a+b) dS
cd cr_operator(const SpectralProfile& u, const SpectralProfile& v,
               const SpectralProfile& w, double k1, double k2,
               const ChartOptions& opt = {});

// level profile xi -> \int_{S_k(xi)} u conj(v) w dS; with times_2pi set the
// values carry the co-area prefactor 2pi
struct KineticProfile {
    std::vector<double> xi;
    std::vector<cd> value;
    bool times_2pi = false;
};
KineticProfile khat_profile(const SpectralProfile& u, const SpectralProfile& v,
                            const SpectralProfile& w, double k1, double k2,
                            const std::vector<double>& xi_grid,
                            bool times_2pi = false, const ChartOptions& opt = {});

// wave-kinetic collision value at k for the spectrum n:
//   \int_{S_k(0)} [ n1 n2 n3 - n n2 n3 + n n1 n3 - n n1 n2 ] dS
// with n = n(k), n1 = n(k+a), n2 = n(k+a+b), n3 = n(k+b); evaluated as one
// chart quadrature of the expanded bracket (no division by n)
double wk_operator(const SpectralProfile& n, double k1, double k2,
                   const ChartOptions& opt = {});

// finite-time oscillatory pairing against a level profile, and its t -> inf
// principal-value limit:
//   finite_t = \int (1 - e^{-i t xi}) / (i xi) * S(xi) dxi
//   limit    = pi S(0) + S(0) log(b/|a|)/i + \int (S(xi) - S(0)) / (i xi) dxi
// S is the cubic-spline interpolant of the sampled profile on [a, b] (which
// must straddle 0; the log term makes `limit` the true t -> infinity value
// of `finite_t` on asymmetric intervals).
struct PvResult {
    cd finite_t{0.0, 0.0};
    cd limit{0.0, 0.0};
};
PvResult pv_limit(const KineticProfile& profile, double t);

// spline-based reconstruction \int e^{i t xi} S(xi) dxi (decay diagnostics)
cd profile_time_signal(const KineticProfile& profile, double t);

// natural cubic spline through (x_i, y_i); x strictly increasing
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double derivative(double x) const;

private:
    std::vector<double> x_, y_, m_;  // m_ = second derivatives
};

}  // namespace wavekin
