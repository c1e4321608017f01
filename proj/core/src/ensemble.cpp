#include "wavekin/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"

namespace wavekin {

namespace {

struct SiteKey {
    long long x, y;
    bool operator<(const SiteKey& o) const {
        return x != o.x ? x < o.x : y < o.y;
    }
    bool operator==(const SiteKey&) const = default;
};

double sq(double x) { return x * x; }

// inverse of the 3x3 Vandermonde system y = c0 x + c1 x^2 + c2 x^3, x = eps^2;
// the fit runs per realization (the ladder shares one phase draw, so the
// noise of the three points is strongly correlated and the per-point errors
// must not be propagated independently)
std::array<std::array<double, 3>, 3> vandermonde_inverse(
    const std::array<double, 3>& eps) {
    double V[3][3];
    std::array<std::array<double, 3>, 3> inv;
    for (int j = 0; j < 3; ++j) {
        const double x = eps[static_cast<std::size_t>(j)] *
                         eps[static_cast<std::size_t>(j)];
        V[j][0] = x;
        V[j][1] = x * x;
        V[j][2] = x * x * x;
    }
    const double det =
        V[0][0] * (V[1][1] * V[2][2] - V[1][2] * V[2][1]) -
        V[0][1] * (V[1][0] * V[2][2] - V[1][2] * V[2][0]) +
        V[0][2] * (V[1][0] * V[2][1] - V[1][1] * V[2][0]);
    if (det == 0.0) throw std::domain_error("ladder fit: degenerate ladder");
    inv[0][0] = (V[1][1] * V[2][2] - V[1][2] * V[2][1]) / det;
    inv[0][1] = -(V[0][1] * V[2][2] - V[0][2] * V[2][1]) / det;
    inv[0][2] = (V[0][1] * V[1][2] - V[0][2] * V[1][1]) / det;
    inv[1][0] = -(V[1][0] * V[2][2] - V[1][2] * V[2][0]) / det;
    inv[1][1] = (V[0][0] * V[2][2] - V[0][2] * V[2][0]) / det;
    inv[1][2] = -(V[0][0] * V[1][2] - V[0][2] * V[1][0]) / det;
    inv[2][0] = (V[1][0] * V[2][1] - V[1][1] * V[2][0]) / det;
    inv[2][1] = -(V[0][0] * V[2][1] - V[0][1] * V[2][0]) / det;
    inv[2][2] = (V[0][0] * V[1][1] - V[0][1] * V[1][0]) / det;
    return inv;
}

struct RunningMoment {
    KahanReal s1, s2;
    std::size_t n = 0;
    void add(double x) {
        s1 += x;
        s2 += x * x;
        ++n;
    }
    MomentEstimate estimate() const {
        MomentEstimate m;
        m.n = n;
        if (n == 0) return m;
        m.mean = s1.value() / static_cast<double>(n);
        const double var =
            std::max(0.0, s2.value() / static_cast<double>(n) - m.mean * m.mean);
        m.stderr_ = std::sqrt(var / static_cast<double>(n));
        return m;
    }
};

}  // namespace

int pairing_expectation(const std::vector<std::pair<IVec2, bool>>& legs) {
    std::multiset<SiteKey> plain, conj;
    for (const auto& [n, c] : legs)
        (c ? conj : plain).insert(SiteKey{n.x, n.y});
    return plain == conj ? 1 : 0;
}

double phi_second_moment(const ScalingParams& p, const SpectralProfile& eta,
                         IVec2 mK) {
    const double s2 = p.sigma * p.sigma, h2 = p.h * p.h;
    const double Kx = static_cast<double>(mK.x) / p.L;
    const double Ky = static_cast<double>(mK.y) / p.L;
    KahanReal acc;
    for (const IVec2& n : window_sites(LatticeSpec{p.L}, eta.support_radius)) {
        const double qx = static_cast<double>(n.x) / p.L;
        const double qy = static_cast<double>(n.y) / p.L;
        const double a = eta(qx, qy);
        if (a <= 0.0) continue;
        const double d2 = sq(Kx - qx) + sq(Ky - qy);
        acc += sq(a * std::exp(-d2 / (2.0 * (h2 + s2))));
    }
    return sq(s2 / (s2 + h2)) * acc.value();
}

double v1_second_moment(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t) {
    const LatticeSpec lat{p.L};
    const auto triples = enumerate_triples(lat, eta.support_radius, mK, 40000000);
    struct Entry {
        IVec2 n1, n2, n3;
        double eta3;
        cd kern;
    };
    std::vector<Entry> list;
    const auto val = [&](const IVec2& n) {
        return eta(static_cast<double>(n.x) / p.L, static_cast<double>(n.y) / p.L);
    };
    for (const Triple& T : triples) {
        const double e3 = val(T.n1) * val(T.n2) * val(T.n3);
        if (e3 <= 0.0) continue;
        const cd k = T.defect_num == 0
                         ? osc_kernel_zero(t)
                         : osc_kernel(t, static_cast<double>(T.defect_num) /
                                             (p.L * p.L));
        list.push_back({T.n1, T.n2, T.n3, e3, k});
    }
    KahanReal acc;
    for (const Entry& a : list) {
        for (const Entry& b : list) {
            // multiset pairing {K1,K3,K2'} vs {K2,K1',K3'}
            std::array<SiteKey, 3> u{SiteKey{a.n1.x, a.n1.y}, SiteKey{a.n3.x, a.n3.y},
                                     SiteKey{b.n2.x, b.n2.y}};
            std::array<SiteKey, 3> c{SiteKey{a.n2.x, a.n2.y}, SiteKey{b.n1.x, b.n1.y},
                                     SiteKey{b.n3.x, b.n3.y}};
            std::sort(u.begin(), u.end());
            std::sort(c.begin(), c.end());
            if (!(u == c)) continue;
            acc += a.eta3 * b.eta3 * (a.kern * std::conj(b.kern)).real();
        }
    }
    return std::pow(kTwoPi, -8) * acc.value();
}

EnsembleResult variance_mc(const ScalingParams& p, const SpectralProfile& eta,
                           IVec2 mK, double t, const EnsembleOptions& opt,
                           const IVec2* mKprime) {
    const LatticeSpec lat{p.L};
    const auto sites = window_sites(lat, eta.support_radius);
    const std::size_t M = sites.size();
    std::map<SiteKey, std::size_t> index;
    std::vector<double> etav(M), kx(M), ky(M);
    for (std::size_t i = 0; i < M; ++i) {
        index[{sites[i].x, sites[i].y}] = i;
        kx[i] = static_cast<double>(sites[i].x) / p.L;
        ky[i] = static_cast<double>(sites[i].y) / p.L;
        etav[i] = eta(kx[i], ky[i]);
    }
    const auto site_index = [&](const IVec2& n) -> std::ptrdiff_t {
        auto it = index.find({n.x, n.y});
        return it == index.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
    };

    // coarse-grain weights for a target site
    const auto weights0 = [&](IVec2 target) {
        const double s2 = p.sigma * p.sigma, h2 = p.h * p.h;
        const double Kx = static_cast<double>(target.x) / p.L;
        const double Ky = static_cast<double>(target.y) / p.L;
        std::vector<double> w(M);
        for (std::size_t i = 0; i < M; ++i)
            w[i] = s2 / (s2 + h2) * etav[i] *
                   std::exp(-(sq(Kx - kx[i]) + sq(Ky - ky[i])) / (2.0 * (s2 + h2)));
        return w;
    };

    struct T3 {
        std::uint32_t i1, i2, i3;
        cd base_f, base_b;  // eta product times the time kernel (t and -t)
    };
    const auto triples_for = [&](IVec2 target) {
        std::vector<T3> out;
        for (const Triple& T :
             enumerate_triples(lat, eta.support_radius, target, 40000000)) {
            const std::ptrdiff_t i1 = site_index(T.n1), i3 = site_index(T.n3);
            const std::ptrdiff_t i2 = site_index(T.n2);
            if (i1 < 0 || i2 < 0 || i3 < 0) continue;
            const double e3 = etav[static_cast<std::size_t>(i1)] *
                              etav[static_cast<std::size_t>(i2)] *
                              etav[static_cast<std::size_t>(i3)];
            if (e3 <= 0.0) continue;
            const double dw = static_cast<double>(T.defect_num) / (p.L * p.L);
            const cd kf =
                T.defect_num == 0 ? osc_kernel_zero(t) : osc_kernel(t, dw);
            const cd kb =
                T.defect_num == 0 ? osc_kernel_zero(-t) : osc_kernel(-t, dw);
            out.push_back({static_cast<std::uint32_t>(i1),
                           static_cast<std::uint32_t>(i2),
                           static_cast<std::uint32_t>(i3), e3 * kf, e3 * kb});
        }
        return out;
    };

    struct T5 {
        std::array<std::uint32_t, 5> idx;
        std::array<int, 5> sign;
        cd base_f, base_b;
    };
    const auto quintuples_for = [&](IVec2 target) {
        std::vector<T5> out;
        if (!opt.include_v2) return out;
        const double L2 = p.L * p.L;
        for_each_quintuple(
            lat, eta.support_radius, target,
            [&](const std::array<IVec2, 5>& legs, const std::array<int, 5>& sign,
                long long d_out, long long d_in, int inner_sign, int weight) {
                T5 e;
                double ep = static_cast<double>(weight);
                for (int j = 0; j < 5; ++j) {
                    const std::ptrdiff_t i = site_index(legs[static_cast<std::size_t>(j)]);
                    if (i < 0) {
                        ep = 0.0;
                        break;
                    }
                    e.idx[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
                    ep *= etav[static_cast<std::size_t>(i)];
                }
                if (ep == 0.0) return;
                e.sign = sign;
                const bool az = d_out == 0, bz = d_in == 0;
                const bool sz = d_out + (inner_sign > 0 ? d_in : -d_in) == 0;
                const double a = static_cast<double>(d_out) / L2;
                const double b = static_cast<double>(d_in) / L2;
                e.base_f = ep * double_osc_kernel(t, a, b, inner_sign, az, bz, sz);
                e.base_b = ep * double_osc_kernel(-t, a, b, inner_sign, az, bz, sz);
                out.push_back(e);
            });
        return out;
    };

    const auto w0 = weights0(mK);
    const auto t3 = triples_for(mK);
    const auto t5 = quintuples_for(mK);
    std::vector<double> w0p;
    std::vector<T3> t3p;
    std::vector<T5> t5p;
    if (mKprime) {
        w0p = weights0(*mKprime);
        t3p = triples_for(*mKprime);
        t5p = quintuples_for(*mKprime);
    }

    const double c4 = std::pow(kTwoPi, -4), c8 = std::pow(kTwoPi, -8);
    PhaseEnsemble phases{opt.seed};

    const auto vinv = vandermonde_inverse(opt.eps);
    std::array<RunningMoment, 3> abs_f, abs_b, fit_f, fit_b;
    RunningMoment phi2, v12;
    KahanComplex cross_sum, mean_k, mean_kp;
    std::size_t cross_n = 0;
    KahanReal cross_re2, cross_im2;

    std::vector<double> theta(M);
    for (std::size_t r = 0; r < opt.n_realizations; ++r) {
        for (std::size_t i = 0; i < M; ++i) theta[i] = phases.phase(r, sites[i]);
        const auto eval_pieces = [&](const std::vector<double>& w,
                                     const std::vector<T3>& l3,
                                     const std::vector<T5>& l5, bool backward) {
            KahanComplex a0, a1, a2;
            for (std::size_t i = 0; i < M; ++i)
                if (w[i] != 0.0) a0 += w[i] * std::exp(cd(0.0, theta[i]));
            for (const T3& e : l3) {
                const double ph = theta[e.i1] - theta[e.i2] + theta[e.i3];
                a1 += (backward ? e.base_b : e.base_f) * std::exp(cd(0.0, ph));
            }
            for (const T5& e : l5) {
                double ph = 0.0;
                for (std::size_t j = 0; j < 5; ++j)
                    ph += (e.sign[j] > 0 ? 1.0 : -1.0) * theta[e.idx[j]];
                a2 += (backward ? e.base_b : e.base_f) * std::exp(cd(0.0, ph));
            }
            return std::array<cd, 3>{a0.value(), c4 * a1.value(), c8 * a2.value()};
        };
        const auto pieces_f = eval_pieces(w0, t3, t5, false);
        const auto combine = [&](const std::array<cd, 3>& pc, double eps) {
            const cd mi(0.0, -1.0);
            return eps * pc[0] + mi * eps * eps * eps * pc[1] -
                   std::pow(eps, 5) * pc[2];
        };
        std::array<double, 3> yf{};
        for (std::size_t j = 0; j < 3; ++j) {
            yf[j] = std::norm(combine(pieces_f, opt.eps[j]));
            abs_f[j].add(yf[j]);
        }
        for (std::size_t k = 0; k < 3; ++k)
            fit_f[k].add(vinv[k][0] * yf[0] + vinv[k][1] * yf[1] +
                         vinv[k][2] * yf[2]);
        phi2.add(std::norm(pieces_f[0]));
        v12.add(std::norm(pieces_f[1]));
        if (opt.antisym) {
            const auto pieces_b = eval_pieces(w0, t3, t5, true);
            std::array<double, 3> yb{};
            for (std::size_t j = 0; j < 3; ++j) {
                yb[j] = std::norm(combine(pieces_b, opt.eps[j]));
                abs_b[j].add(yb[j]);
            }
            for (std::size_t k = 0; k < 3; ++k)
                fit_b[k].add(vinv[k][0] * yb[0] + vinv[k][1] * yb[1] +
                             vinv[k][2] * yb[2]);
        }
        if (mKprime) {
            const auto pieces_p = eval_pieces(w0p, t3p, t5p, false);
            const cd ok = combine(pieces_f, opt.eps[1]);
            const cd okp = combine(pieces_p, opt.eps[1]);
            const cd prod = ok * std::conj(okp);
            cross_sum += prod;
            mean_k += ok;
            mean_kp += okp;
            cross_re2 += sq(prod.real());
            cross_im2 += sq(prod.imag());
            ++cross_n;
        }
    }

    EnsembleResult res;
    res.eps = opt.eps;
    for (std::size_t j = 0; j < 3; ++j) {
        res.abs2_fwd[j] = abs_f[j].estimate();
        if (opt.antisym) res.abs2_bwd[j] = abs_b[j].estimate();
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const MomentEstimate mf = fit_f[k].estimate();
        res.fit_fwd.coeff[k] = mf.mean;
        res.fit_fwd.coeff_err[k] = mf.stderr_;
        if (opt.antisym) {
            const MomentEstimate mb = fit_b[k].estimate();
            res.fit_bwd.coeff[k] = mb.mean;
            res.fit_bwd.coeff_err[k] = mb.stderr_;
        }
    }
    res.phi_abs2_exact = phi_second_moment(p, eta, mK);
    res.phi_abs2_mc = phi2.estimate();
    res.v1_abs2_exact = v1_second_moment(p, eta, mK, t);
    res.v1_abs2_mc = v12.estimate();
    if (mKprime && cross_n > 0) {
        const double n = static_cast<double>(cross_n);
        const cd cov = cross_sum.value() / n -
                       (mean_k.value() / n) * std::conj(mean_kp.value() / n);
        res.cross_abs.mean = std::abs(cov);
        res.cross_abs.n = cross_n;
        const double vr =
            std::max(0.0, cross_re2.value() / n - sq((cross_sum.value() / n).real()));
        const double vi =
            std::max(0.0, cross_im2.value() / n - sq((cross_sum.value() / n).imag()));
        res.cross_abs.stderr_ = std::sqrt((vr + vi) / n);
    }
    return res;
}

double kinetic_sum(const ScalingParams& p, const SpectralProfile& n, IVec2 mK,
                   double t) {
    const LatticeSpec lat{p.L};
    const auto sites = window_sites(lat, n.support_radius);
    const std::size_t M = sites.size();
    const double R2 = sq(n.support_radius * p.L);
    std::vector<double> nv(M);
    std::map<SiteKey, std::size_t> index;
    for (std::size_t i = 0; i < M; ++i) {
        nv[i] = n(static_cast<double>(sites[i].x) / p.L,
                  static_cast<double>(sites[i].y) / p.L);
        index[{sites[i].x, sites[i].y}] = i;
    }
    const double n0 = n(static_cast<double>(mK.x) / p.L,
                        static_cast<double>(mK.y) / p.L);
    long long max_a2 = 0;
    for (const IVec2& s : sites)
        max_a2 = std::max(max_a2, norm2(IVec2{s.x - mK.x, s.y - mK.y}));
    const long long D = 2 * max_a2 + 4;

    struct Acc {
        double s = 0.0, c = 0.0;
        void add(double x) {
            const double y = x - c;
            const double u = s + y;
            c = (u - s) - y;
            s = u;
        }
    };
    const std::size_t n_chunks = default_chunks(M);
    std::vector<std::vector<Acc>> partial(n_chunks);
    for_chunks(M, n_chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
        auto& lv = partial[c];
        lv.assign(static_cast<std::size_t>(2 * D + 1), Acc{});
        for (std::size_t i = b; i < e; ++i) {
            const IVec2 n1 = sites[i];
            const long long ax = n1.x - mK.x, ay = n1.y - mK.y;
            for (std::size_t j = 0; j < M; ++j) {
                const IVec2 n3 = sites[j];
                const long long bx = n3.x - mK.x, by = n3.y - mK.y;
                const IVec2 n2{n1.x + n3.x - mK.x, n1.y + n3.y - mK.y};
                if (static_cast<double>(norm2(n2)) > R2) continue;
                const auto it = index.find({n2.x, n2.y});
                const double v2 = it == index.end() ? 0.0 : nv[it->second];
                const double v1 = nv[i], v3 = nv[j];
                // only quadruples whose three legs carry spectrum: boundary
                // sites with n = 0 would otherwise feed lone loss terms and
                // break the flat-spectrum cancellation
                if (v1 <= 0.0 || v2 <= 0.0 || v3 <= 0.0) continue;
                const double bracket =
                    v1 * v2 * v3 - n0 * v2 * v3 + n0 * v1 * v3 - n0 * v1 * v2;
                const long long d = 2 * (ax * bx + ay * by);
                lv[static_cast<std::size_t>(d + D)].add(bracket);
            }
        }
    });
    KahanReal out;
    const double L2 = p.L * p.L;
    for (long long d = 0; d <= D; ++d) {
        for (const long long dd : d == 0 ? std::vector<long long>{0}
                                         : std::vector<long long>{-d, d}) {
            Acc lvl;
            for (const auto& part : partial) {
                if (part.empty()) continue;
                lvl.add(part[static_cast<std::size_t>(dd + D)].s);
                lvl.add(-part[static_cast<std::size_t>(dd + D)].c);
            }
            if (lvl.s == 0.0 && lvl.c == 0.0) continue;
            const double kappa =
                dd == 0 ? t * t : std::norm(osc_kernel(t, static_cast<double>(dd) / L2));
            out += lvl.s * kappa;
        }
    }
    return out.value();
}

}  // namespace wavekin
