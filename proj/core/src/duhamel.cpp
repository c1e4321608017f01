#include "wavekin/duhamel.hpp"

#include <cmath>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/quadrature.hpp"

namespace wavekin {

cd osc_kernel(double t, double x) {
    const double tx = t * x;
    if (std::abs(tx) < 1e-6) {
        // t * (1 + i tx/2 - tx^2/6 - i tx^3/24)
        return t * cd(1.0 - tx * tx / 6.0, 0.5 * tx);
    }
    return (std::exp(cd(0.0, tx)) - 1.0) / cd(0.0, x);
}

// G_t(a) = \int_0^t s e^{isa} ds
static cd ramp_kernel(double t, double a, bool a_zero) {
    if (a_zero) return {0.5 * t * t, 0.0};
    const cd E = osc_kernel(t, a);
    return (t * std::exp(cd(0.0, t * a)) - E) / cd(0.0, a);
}

cd double_osc_kernel(double t, double a, double b, int sign, bool a_zero,
                     bool b_zero, bool a_plus_sign_b_zero) {
    const double q = sign > 0 ? b : -b;
    if (b_zero) return ramp_kernel(t, a, a_zero);
    const cd Eaq = a_plus_sign_b_zero ? osc_kernel_zero(t) : osc_kernel(t, a + q);
    const cd Ea = a_zero ? osc_kernel_zero(t) : osc_kernel(t, a);
    return (Eaq - Ea) / cd(0.0, q);
}

cd w1_kernel(const ScalingParams& p, double K1x, double K1y, double K2x,
             double K2y, double K3x, double K3y, double Kx, double Ky, double s) {
    const double h2 = p.h * p.h, s2 = p.sigma * p.sigma;
    const cd bh = beta_factor(s, p.h);
    const cd bs = beta_factor(s, p.sigma);
    const cd bhc = std::conj(bh), bsc = std::conj(bs);
    const cd z = h2 * bh + 0.5 * h2 * bhc + 0.5 * s2 * bsc;
    const cd i(0.0, 1.0);
    const cvec2 zeta{i * bh * (K1x + K3x) - i * bhc * K2x - i * bsc * Kx,
                     i * bh * (K1y + K3y) - i * bhc * K2y - i * bsc * Ky};
    const double w1 = K1x * K1x + K1y * K1y, w2 = K2x * K2x + K2y * K2y;
    const double w3 = K3x * K3x + K3y * K3y, w0 = Kx * Kx + Ky * Ky;
    const cd gamma = -i * s * bh * (w1 + w3) + i * s * bhc * w2 + i * s * bsc * w0;
    const double pref2pi = std::pow(kTwoPi, -8);
    return (kPi / z) * pref2pi * std::norm(bh) * bh * bsc *
           std::exp(gamma + cdot(zeta, zeta) / (4.0 * z));
}

cd w1_kernel_reference(const ScalingParams& p, double K1x, double K1y, double K2x,
                       double K2y, double K3x, double K3y, double Kx, double Ky,
                       double s) {
    const ComplexGaussian g0 = propagate(building_block(Kx, Ky, p.sigma), s);
    const ComplexGaussian g1 = propagate(building_block(K1x, K1y, p.h), s);
    const ComplexGaussian g2 = propagate(building_block(K2x, K2y, p.h), s);
    const ComplexGaussian g3 = propagate(building_block(K3x, K3y, p.h), s);
    return integrate_plane(product({g0, g1, g2, g3}, {true, false, true, false}));
}

ExpansionValue v1_exact(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t, const ExpansionOptions& opt,
                        const PhaseEnsemble* phases, std::uint64_t realization) {
    const LatticeSpec lat{p.L};
    const auto sites = window_sites(lat, eta.support_radius);
    const std::size_t M = sites.size();
    if (M * M * M > opt.budget)
        throw std::length_error("v1_exact: triple budget exceeded");

    // mode amplitudes
    std::vector<cd> zeta(M);
    std::vector<double> kx(M), ky(M);
    for (std::size_t i = 0; i < M; ++i) {
        kx[i] = static_cast<double>(sites[i].x) / p.L;
        ky[i] = static_cast<double>(sites[i].y) / p.L;
        cd z(eta(kx[i], ky[i]), 0.0);
        if (phases && z != cd(0.0))
            z *= std::exp(cd(0.0, phases->phase(realization, sites[i])));
        zeta[i] = z;
    }
    const double Kx = static_cast<double>(mK.x) / p.L;
    const double Ky = static_cast<double>(mK.y) / p.L;
    const double mismatch_scale =
        2.0 * (3.0 * p.h * p.h + p.sigma * p.sigma);  // 4 Re z(0)

    const std::size_t n_chunks = default_chunks(M * M);
    std::vector<KahanComplex> part(n_chunks);
    std::vector<std::size_t> used(n_chunks, 0), pruned(n_chunks, 0);
    for_chunks(M * M, n_chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) {
            const std::size_t i1 = idx / M, i2 = idx % M;
            if (zeta[i1] == cd(0.0) || zeta[i2] == cd(0.0)) continue;
            for (std::size_t i3 = 0; i3 < M; ++i3) {
                if (zeta[i3] == cd(0.0)) continue;
                const double Dx = kx[i1] - kx[i2] + kx[i3] - Kx;
                const double Dy = ky[i1] - ky[i2] + ky[i3] - Ky;
                if ((Dx * Dx + Dy * Dy) / mismatch_scale >
                    opt.mismatch_exponent_cutoff) {
                    ++pruned[c];
                    continue;
                }
                ++used[c];
                const cd tw = integrate_gk(
                    [&](double s) {
                        return w1_kernel(p, kx[i1], ky[i1], kx[i2], ky[i2], kx[i3],
                                         ky[i3], Kx, Ky, s);
                    },
                    0.0, t, 1e-18, opt.quad_rel_tol, 40);
                part[c] += zeta[i1] * std::conj(zeta[i2]) * zeta[i3] * tw;
            }
        }
    });
    ExpansionValue out;
    KahanComplex acc;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        acc += part[c];
        out.terms_used += used[c];
        out.terms_pruned += pruned[c];
    }
    out.value = std::pow(kTwoPi, 3) * p.sigma * p.sigma * acc.value();
    return out;
}

cd v1_leading(const ScalingParams& p, const SpectralProfile& eta, IVec2 mK,
              double t, const PhaseEnsemble* phases, std::uint64_t realization) {
    const LatticeSpec lat{p.L};
    const long long R =
        static_cast<long long>(std::floor(eta.support_radius * p.L));
    const long long half = 2 * R + std::max(std::llabs(mK.x), std::llabs(mK.y)) + 2;
    const SiteTable table = make_site_table(lat, eta, half, phases, realization);
    const auto levels = level_set_profile(lat, table, mK, eta.support_radius);
    const cd s = kernel_sum(
        lat, levels, [&](double dw) { return osc_kernel(t, dw); },
        osc_kernel_zero(t));
    return std::pow(kTwoPi, -4) * s;
}

void for_each_quintuple(const LatticeSpec& lat, double radius, IVec2 mK,
                        const QuintupleFn& fn) {
    const auto sites = window_sites(lat, radius);
    const double R2 = radius * radius * lat.L * lat.L;
    const auto inside = [&](const IVec2& n) {
        return static_cast<double>(norm2(n)) <= R2;
    };
    const long long m2 = norm2(mK);
    // structure A: K = K1 - K2 + K3, K1 = K4 - K5 + K6; legs K2,K3,K4,K5,K6
    for (const IVec2& n2 : sites) {
        for (const IVec2& n3 : sites) {
            const IVec2 n1{mK.x + n2.x - n3.x, mK.y + n2.y - n3.y};
            const long long d_out = m2 - norm2(n1) + norm2(n2) - norm2(n3);
            for (const IVec2& n4 : sites) {
                for (const IVec2& n6 : sites) {
                    const IVec2 n5{n4.x + n6.x - n1.x, n4.y + n6.y - n1.y};
                    if (!inside(n5)) continue;
                    const long long d_in =
                        norm2(n1) - norm2(n4) + norm2(n5) - norm2(n6);
                    fn({n2, n3, n4, n5, n6}, {-1, 1, 1, -1, 1}, d_out, d_in, +1, 2);
                }
            }
        }
    }
    // structure B: K = K1 - K2 + K3, K2 = K4 - K5 + K6; legs K1,K3,K4,K5,K6
    for (const IVec2& n1 : sites) {
        for (const IVec2& n3 : sites) {
            const IVec2 n2{n1.x + n3.x - mK.x, n1.y + n3.y - mK.y};
            const long long d_out = m2 - norm2(n1) + norm2(n2) - norm2(n3);
            for (const IVec2& n4 : sites) {
                for (const IVec2& n6 : sites) {
                    const IVec2 n5{n4.x + n6.x - n2.x, n4.y + n6.y - n2.y};
                    if (!inside(n5)) continue;
                    const long long d_in =
                        norm2(n2) - norm2(n4) + norm2(n5) - norm2(n6);
                    fn({n1, n3, n4, n5, n6}, {1, 1, -1, 1, -1}, d_out, d_in, -1, 1);
                }
            }
        }
    }
}

cd v2_leading(const ScalingParams& p, const SpectralProfile& eta, IVec2 mK,
              double t, const PhaseEnsemble* phases, std::uint64_t realization) {
    const LatticeSpec lat{p.L};
    const double L2 = p.L * p.L;
    KahanComplex acc;
    for_each_quintuple(
        lat, eta.support_radius, mK,
        [&](const std::array<IVec2, 5>& legs, const std::array<int, 5>& sign,
            long long d_out, long long d_in, int inner_sign, int weight) {
            cd zp(static_cast<double>(weight), 0.0);
            for (int j = 0; j < 5; ++j) {
                const IVec2& n = legs[static_cast<std::size_t>(j)];
                const double a = eta(static_cast<double>(n.x) / p.L,
                                     static_cast<double>(n.y) / p.L);
                if (a == 0.0) {
                    zp = cd(0.0);
                    break;
                }
                cd z(a, 0.0);
                if (phases) z *= std::exp(cd(0.0, phases->phase(realization, n)));
                zp *= sign[static_cast<std::size_t>(j)] > 0 ? z : std::conj(z);
            }
            if (zp == cd(0.0)) return;
            const cd kern = double_osc_kernel(
                t, static_cast<double>(d_out) / L2, static_cast<double>(d_in) / L2,
                inner_sign, d_out == 0, d_in == 0,
                d_out + (inner_sign > 0 ? d_in : -d_in) == 0);
            acc += zp * kern;
        });
    return std::pow(kTwoPi, -8) * acc.value();
}

ExpansionValue v2_exact(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t, double quad_rel_tol,
                        std::size_t budget, const PhaseEnsemble* phases,
                        std::uint64_t realization) {
    const LatticeSpec lat{p.L};
    const auto sites = window_sites(lat, eta.support_radius);
    const std::size_t M = sites.size();
    if (M * M * M * M * M > budget)
        throw std::length_error("v2_exact: quintuple budget exceeded");
    std::vector<cd> zeta(M);
    std::vector<ComplexGaussian> g(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double x = static_cast<double>(sites[i].x) / p.L;
        const double y = static_cast<double>(sites[i].y) / p.L;
        cd z(eta(x, y), 0.0);
        if (phases && z != cd(0.0))
            z *= std::exp(cd(0.0, phases->phase(realization, sites[i])));
        zeta[i] = z;
        g[i] = building_block(x, y, p.h);
    }
    const ComplexGaussian gK =
        building_block(static_cast<double>(mK.x) / p.L,
                       static_cast<double>(mK.y) / p.L, p.sigma);
    const double pref = std::pow(kTwoPi, 3) * p.sigma * p.sigma;

    ExpansionValue out;
    KahanComplex acc;
    for (std::size_t j1 = 0; j1 < M; ++j1)
    for (std::size_t j2 = 0; j2 < M; ++j2)
    for (std::size_t j3 = 0; j3 < M; ++j3)
    for (std::size_t j4 = 0; j4 < M; ++j4)
    for (std::size_t j5 = 0; j5 < M; ++j5) {
        // structure A: z1 conj(z2) z3 conj(z4) z5; structure B places the
        // inner term in the conjugated slot, so its legs flip
        const cd zpA = zeta[j1] * std::conj(zeta[j2]) * zeta[j3] *
                       std::conj(zeta[j4]) * zeta[j5];
        const cd zpB = zeta[j1] * zeta[j2] * std::conj(zeta[j3]) * zeta[j4] *
                       std::conj(zeta[j5]);
        if (zpA == cd(0.0)) continue;
        ++out.terms_used;
        auto kernelA = [&](double s, double sp) -> cd {
            const ComplexGaussian inner =
                product({propagate(g[j3], sp), propagate(g[j4], sp),
                         propagate(g[j5], sp)},
                        {false, true, false});
            return integrate_plane(product(
                {propagate(gK, s), propagate(g[j1], s), propagate(g[j2], s),
                 propagate(inner, s - sp)},
                {true, false, true, false}));
        };
        auto kernelB = [&](double s, double sp) -> cd {
            const ComplexGaussian inner =
                product({propagate(g[j3], sp), propagate(g[j4], sp),
                         propagate(g[j5], sp)},
                        {false, true, false});
            return integrate_plane(product(
                {propagate(gK, s), propagate(g[j1], s), propagate(inner, s - sp),
                 propagate(g[j2], s)},
                {true, false, true, false}));
        };
        auto time2 = [&](const std::function<cd(double, double)>& kern) -> cd {
            return integrate_gk(
                [&](double s) {
                    if (s == 0.0) return cd(0.0, 0.0);
                    return integrate_gk([&](double sp) { return kern(s, sp); }, 0.0,
                                        s, 1e-16, 0.1 * quad_rel_tol, 36);
                },
                0.0, t, 1e-16, quad_rel_tol, 36);
        };
        acc += 2.0 * zpA * time2(kernelA);
        acc += zpB * time2(kernelB);
    }
    out.value = pref * acc.value();
    return out;
}

cd trilinear_decay(const WavePacketSum& u, const WavePacketSum& v,
                   const WavePacketSum& w, double k1, double k2, double t) {
    KahanComplex acc;
    const cd i(0.0, 1.0);
    for (const auto& tu : u.terms) {
        for (const auto& tv0 : v.terms) {
            const ComplexGaussian tv = conjugate(tv0);
            for (const auto& tw : w.terms) {
                const cd zu = tu.quad, zv = tv.quad, zw = tw.quad;
                const cd Za = zu + zw;
                if (!(Za.real() > 0.0))
                    throw std::domain_error("trilinear_decay: a-form not positive");
                const cd q = 2.0 * i * t - 2.0 * zw;
                const cd Zb = zv + zw - q * q / (4.0 * Za);
                if (!(Zb.real() > 0.0))
                    throw std::domain_error(
                        "trilinear_decay: coupled b-form lost positivity");
                const cd k2n = cd(k1 * k1 + k2 * k2, 0.0);
                const cd c0 = tu.log_amp + tv.log_amp + tw.log_amp -
                              (zu + zv + zw) * k2n +
                              (tu.lin[0] + tv.lin[0] + tw.lin[0]) * k1 +
                              (tu.lin[1] + tv.lin[1] + tw.lin[1]) * k2;
                const cvec2 al{tu.lin[0] + tw.lin[0] - 2.0 * (zu + zw) * k1,
                               tu.lin[1] + tw.lin[1] - 2.0 * (zu + zw) * k2};
                const cvec2 bl{tv.lin[0] + tw.lin[0] - 2.0 * (zv + zw) * k1,
                               tv.lin[1] + tw.lin[1] - 2.0 * (zv + zw) * k2};
                const cvec2 bl_eff = bl + (q / (2.0 * Za)) * al;
                const cd log_val = c0 + std::log(kPi / Za) + std::log(kPi / Zb) +
                                   cdot(al, al) / (4.0 * Za) +
                                   cdot(bl_eff, bl_eff) / (4.0 * Zb);
                acc += std::exp(log_val);
            }
        }
    }
    return acc.value();
}

std::vector<cd> decay_profile(const WavePacketSum& u, const WavePacketSum& v,
                              const WavePacketSum& w, double k1, double k2,
                              const std::vector<double>& times) {
    std::vector<cd> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(trilinear_decay(u, v, w, k1, k2, t));
    return out;
}

}  // namespace wavekin
