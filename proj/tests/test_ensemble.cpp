#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <map>

#include "oracles.hpp"
#include "wavekin/ensemble.hpp"
#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/resonance.hpp"

using namespace wavekin;

TEST_CASE("phase pairing expectation is multiset matching") {
    using L = std::vector<std::pair<IVec2, bool>>;
    CHECK(pairing_expectation(L{}) == 1);
    CHECK(pairing_expectation(L{{{1, 2}, false}, {{1, 2}, true}}) == 1);
    CHECK(pairing_expectation(L{{{1, 2}, false}, {{2, 1}, true}}) == 0);
    CHECK(pairing_expectation(L{{{1, 2}, false}}) == 0);
    CHECK(pairing_expectation(L{{{0, 0}, false}, {{1, 0}, false},
                                {{1, 0}, true}, {{0, 0}, true}}) == 1);
    CHECK(pairing_expectation(L{{{0, 0}, false}, {{0, 0}, false},
                                {{0, 0}, true}}) == 0);
}

TEST_CASE("closed second moment of the data observable") {
    ScalingParams p{3.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    const IVec2 mK{1, -1};
    const double got = phi_second_moment(p, eta, mK);
    // re-derivation: E |sum_K zeta_K c_K|^2 = sum_K eta(K)^2 |c_K|^2
    const double s2 = p.sigma * p.sigma, h2 = p.h * p.h;
    KahanReal want;
    for (const IVec2& n : window_sites(LatticeSpec{p.L}, 1.0)) {
        const double q1 = n.x / p.L - mK.x / p.L, q2 = n.y / p.L - mK.y / p.L;
        const double a = eta(n.x / p.L, n.y / p.L);
        const double c = (s2 / (s2 + h2)) * std::exp(-(q1 * q1 + q2 * q2) /
                                                     (2.0 * (s2 + h2)));
        want += (a * a * c * c);
    }
    CHECK(got == doctest::Approx(want.value()).epsilon(1e-12));
}

TEST_CASE("monte carlo agrees with the closed pairing formulas") {
    ScalingParams p{2.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    const IVec2 mK{1, 0};
    const IVec2 mKp{0, 1};
    EnsembleOptions opt;
    opt.n_realizations = 120000;
    opt.antisym = true;
    opt.include_v2 = false;  // the intensity is then an exact quadratic in eps^2
    opt.seed = 11;
    const double t = 2.0;
    const EnsembleResult r = variance_mc(p, eta, mK, t, opt, &mKp);

    // sampled vs closed E|<phi>|^2 and E|V1|^2
    CHECK(std::abs(r.phi_abs2_mc.mean - r.phi_abs2_exact) <=
          4.0 * r.phi_abs2_mc.stderr_);
    CHECK(std::abs(r.v1_abs2_mc.mean - r.v1_abs2_exact) <=
          4.0 * r.v1_abs2_mc.stderr_);
    CHECK(r.phi_abs2_exact == doctest::Approx(phi_second_moment(p, eta, mK)));
    CHECK(r.v1_abs2_exact == doctest::Approx(v1_second_moment(p, eta, mK, t)));

    // per-realization ladder decomposition recovers the pieces exactly:
    // c0 = |<phi>|^2 and c2 = |V1|^2 realization by realization
    CHECK(r.fit_fwd.coeff[0] ==
          doctest::Approx(r.phi_abs2_mc.mean).epsilon(1e-9));
    CHECK(r.fit_fwd.coeff[2] ==
          doctest::Approx(r.v1_abs2_mc.mean).epsilon(1e-6));

    // antisymmetry of the first-order correction: c1(t) = -c1(-t)
    const double c1err =
        std::hypot(r.fit_fwd.coeff_err[1], r.fit_bwd.coeff_err[1]);
    std::printf("c1 fwd=%.4e bwd=%.4e err=%.4e\n", r.fit_fwd.coeff[1],
                r.fit_bwd.coeff[1], c1err);
    CHECK(std::abs(r.fit_fwd.coeff[1] + r.fit_bwd.coeff[1]) <= 4.0 * c1err);

    // closed pairing value of c1 = -2 Im E[A0 conj(A1)]: the pairing keeps
    // quadruples with multiset {a, n2} == {n1, n3}
    {
        const double s2 = p.sigma * p.sigma, h2 = p.h * p.h;
        const double Kx = mK.x / p.L, Ky = mK.y / p.L;
        const auto sitesw = window_sites(LatticeSpec{p.L}, 1.0);
        auto etaof = [&](const IVec2& n) { return eta(n.x / p.L, n.y / p.L); };
        auto w0 = [&](const IVec2& n) {
            const double dx = Kx - n.x / p.L, dy = Ky - n.y / p.L;
            return s2 / (s2 + h2) * etaof(n) *
                   std::exp(-(dx * dx + dy * dy) / (2.0 * (s2 + h2)));
        };
        KahanComplex acc;
        for (const IVec2& a : sitesw) {
            if (etaof(a) <= 0.0) continue;
            for (const Triple& T : enumerate_triples(LatticeSpec{p.L}, 1.0, mK)) {
                const double e3 = etaof(T.n1) * etaof(T.n2) * etaof(T.n3);
                if (e3 <= 0.0) continue;
                std::array<long long, 4> u{a.x * 1000 + a.y, T.n2.x * 1000 + T.n2.y,
                                           0, 0};
                std::array<long long, 4> v{T.n1.x * 1000 + T.n1.y,
                                           T.n3.x * 1000 + T.n3.y, 0, 0};
                if (std::minmax(u[0], u[1]) != std::minmax(v[0], v[1])) continue;
                const cd kern = T.defect_num == 0
                                    ? osc_kernel_zero(t)
                                    : osc_kernel(t, T.defect_num / (p.L * p.L));
                acc += w0(a) * e3 * std::conj(kern);
            }
        }
        const double c1_closed = -2.0 * std::pow(kTwoPi, -4) * std::imag(acc.value());
        std::printf("c1 closed=%.4e\n", c1_closed);
        CHECK(std::abs(r.fit_fwd.coeff[1] - c1_closed) <=
              4.0 * r.fit_fwd.coeff_err[1]);
    }

    // cross-covariance between distinct observation sites vanishes
    CHECK(r.cross_abs.mean <= 4.0 * r.cross_abs.stderr_);

    // second-order kernels switched on: the eps^6 coefficient moves by the
    // A0-A2 interference but stays finite and consistent in magnitude
    EnsembleOptions opt2 = opt;
    opt2.include_v2 = true;
    opt2.n_realizations = 400;
    const EnsembleResult r2 = variance_mc(p, eta, mK, t, opt2);
    CHECK(std::isfinite(r2.fit_fwd.coeff[2]));
    CHECK(std::abs(r2.fit_fwd.coeff[2] - r.fit_fwd.coeff[2]) <=
          10.0 * std::abs(r.fit_fwd.coeff[2]) + 10.0 * r2.fit_fwd.coeff_err[2]);
}

TEST_CASE("global phase shift leaves the intensity distribution unchanged") {
    ScalingParams p{2.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    EnsembleOptions a, b;
    a.n_realizations = b.n_realizations = 3000;
    a.include_v2 = b.include_v2 = false;
    a.seed = 100;
    b.seed = 200;
    const EnsembleResult ra = variance_mc(p, eta, {1, 0}, 0.5, a);
    const EnsembleResult rb = variance_mc(p, eta, {1, 0}, 0.5, b);
    for (int i = 0; i < 3; ++i) {
        const double err =
            std::hypot(ra.abs2_fwd[i].stderr_, rb.abs2_fwd[i].stderr_);
        CHECK(std::abs(ra.abs2_fwd[i].mean - rb.abs2_fwd[i].mean) <= 3.5 * err);
    }
}

TEST_CASE("monte carlo is reproducible and thread-count independent") {
    ScalingParams p{2.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    EnsembleOptions opt;
    opt.n_realizations = 500;
    opt.include_v2 = false;
    set_thread_count(1);
    const EnsembleResult a = variance_mc(p, eta, {1, 0}, 0.5, opt);
    set_thread_count(5);
    const EnsembleResult b = variance_mc(p, eta, {1, 0}, 0.5, opt);
    set_thread_count(0);
    for (int i = 0; i < 3; ++i) {
        CHECK(a.abs2_fwd[i].mean == b.abs2_fwd[i].mean);
        CHECK(a.abs2_fwd[i].stderr_ == b.abs2_fwd[i].stderr_);
    }
}

TEST_CASE("collision sum vanishes exactly for a flat spectrum") {
    ScalingParams p{4.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile flat = make_profile("const", 1.0);
    CHECK(kinetic_sum(p, flat, {0, 0}, 3.0) == 0.0);
    CHECK(kinetic_sum(p, flat, {2, 1}, 3.0) == 0.0);
}

TEST_CASE("collision sum matches a from-scratch quadruple loop") {
    ScalingParams p{3.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile n = make_profile("bump", 1.0);
    const IVec2 mK{1, 0};
    const double t = 2.0;
    const double got = kinetic_sum(p, n, mK, t);

    const auto sites = window_sites(LatticeSpec{p.L}, 1.0);
    const double nk = n(mK.x / p.L, mK.y / p.L);
    KahanReal want;
    for (const IVec2& a : sites)
        for (const IVec2& b : sites) {
            const IVec2 mid{a.x + b.x - mK.x, a.y + b.y - mK.y};
            const double K1x = a.x / p.L, K1y = a.y / p.L;
            const double K2x = mid.x / p.L, K2y = mid.y / p.L;
            const double K3x = b.x / p.L, K3y = b.y / p.L;
            const double n1 = n(K1x, K1y), n2 = n(K2x, K2y), n3 = n(K3x, K3y);
            if (n1 <= 0.0 || n2 <= 0.0 || n3 <= 0.0) continue;  // spectrum-bearing legs only
            const long long dn = norm2(mK) - norm2(a) + norm2(mid) - norm2(b);
            const double dw = static_cast<double>(dn) / (p.L * p.L);
            const double kern =
                dn == 0 ? t * t : std::norm(osc_kernel(t, dw));
            const double bracket =
                n1 * n2 * n3 - nk * n2 * n3 + nk * n1 * n3 - nk * n1 * n2;
            want += (bracket * kern);
        }
    CHECK(got == doctest::Approx(want.value()).epsilon(1e-10));
}
