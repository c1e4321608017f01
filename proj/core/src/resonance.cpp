#include "wavekin/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"

namespace wavekin {

namespace {

struct Acc {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

struct LevelAcc {
    Acc re, im;
    long long count = 0;
};

// single place the pair weight is formed, so the brute-force and fast paths
// perform bit-identical arithmetic
inline cd pair_weight(const SiteTable& z, const IVec2& n1, const IVec2& n2,
                      const IVec2& n3) {
    return z.at(n1.x, n1.y) * std::conj(z.at(n2.x, n2.y)) * z.at(n3.x, n3.y);
}

}  // namespace

SiteTable make_site_table(const LatticeSpec& lat, const SpectralProfile& eta,
                          long long half_width, const PhaseEnsemble* phases,
                          std::uint64_t realization) {
    SiteTable t;
    t.half_width = half_width;
    const long long w = 2 * half_width + 1;
    t.vals.assign(static_cast<std::size_t>(w * w), cd(0.0, 0.0));
    for (long long x = -half_width; x <= half_width; ++x) {
        for (long long y = -half_width; y <= half_width; ++y) {
            const double a = eta(static_cast<double>(x) / lat.L,
                                 static_cast<double>(y) / lat.L);
            if (a <= 0.0) continue;
            cd v(a, 0.0);
            if (phases)
                v *= std::exp(cd(0.0, phases->phase(realization, IVec2{x, y})));
            t.vals[static_cast<std::size_t>((x + half_width) * w + (y + half_width))] = v;
        }
    }
    return t;
}

std::vector<Triple> enumerate_triples(const LatticeSpec& lat, double radius,
                                      IVec2 m, std::size_t budget) {
    const auto sites = window_sites(lat, radius);
    if (sites.size() * sites.size() > budget)
        throw std::length_error("enumerate_triples: triple budget exceeded");
    std::vector<Triple> out;
    out.reserve(sites.size() * sites.size());
    const long long m2 = norm2(m);
    for (const IVec2& n1 : sites) {
        for (const IVec2& n3 : sites) {
            Triple t;
            t.n1 = n1;
            t.n3 = n3;
            t.n2 = {n1.x + n3.x - m.x, n1.y + n3.y - m.y};
            t.defect_num = m2 - norm2(n1) + norm2(t.n2) - norm2(n3);
            out.push_back(t);
        }
    }
    return out;
}

std::vector<ResonantLevel> level_set_profile(const LatticeSpec& lat,
                                             const SiteTable& zeta, IVec2 m,
                                             double radius) {
    const auto sites = window_sites(lat, radius);
    if (sites.empty()) return {};
    long long max_a2 = 0;
    for (const IVec2& n : sites)
        max_a2 = std::max(max_a2, norm2(IVec2{n.x - m.x, n.y - m.y}));
    // |defect| = |2 A.B| <= 2 |A||B|
    const long long D = 2 * (static_cast<long long>(std::sqrt(
                                 static_cast<double>(max_a2) * static_cast<double>(max_a2))) +
                             2);
    const std::size_t n_levels = static_cast<std::size_t>(2 * D + 1);

    const std::size_t n_chunks = default_chunks(sites.size());
    std::vector<std::vector<LevelAcc>> partial(n_chunks);
    for_chunks(sites.size(), n_chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
        auto& lv = partial[c];
        lv.assign(n_levels, LevelAcc{});
        for (std::size_t i = b; i < e; ++i) {
            const IVec2 n1 = sites[i];
            const long long ax = n1.x - m.x, ay = n1.y - m.y;
            for (const IVec2& n3 : sites) {
                const long long bx = n3.x - m.x, by = n3.y - m.y;
                const long long d = 2 * (ax * bx + ay * by);
                const IVec2 n2{n1.x + n3.x - m.x, n1.y + n3.y - m.y};
                const cd w = pair_weight(zeta, n1, n2, n3);
                LevelAcc& a = lv[static_cast<std::size_t>(d + D)];
                a.count += 1;
                a.re.add(w.real());
                a.im.add(w.imag());
            }
        }
    });

    // combine partials in fixed chunk order, then emit sorted by (|d|, d)
    std::vector<ResonantLevel> out;
    std::vector<std::size_t> order(n_levels);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const long long di = static_cast<long long>(i) - D;
        const long long dj = static_cast<long long>(j) - D;
        return std::llabs(di) != std::llabs(dj) ? std::llabs(di) < std::llabs(dj)
                                                : di < dj;
    });
    for (std::size_t idx : order) {
        ResonantLevel r;
        r.defect_num = static_cast<long long>(idx) - D;
        Acc re, im;
        for (const auto& p : partial) {
            if (p.empty()) continue;
            r.count += p[idx].count;
            re.add(p[idx].re.s);
            re.add(-p[idx].re.c);
            im.add(p[idx].im.s);
            im.add(-p[idx].im.c);
        }
        if (r.count == 0) continue;
        r.value = cd(re.s, im.s);
        out.push_back(r);
    }
    return out;
}

ResonantLevel resonant_level_fast(const LatticeSpec& lat, const SiteTable& zeta,
                                  IVec2 m, double radius) {
    const double R = radius * lat.L;
    const double R2 = R * R;
    const auto in_window = [&](long long x, long long y) {
        return static_cast<double>(x * x + y * y) <= R2;
    };
    // integer multiplier range solving |m + s d|^2 <= R^2
    const auto mult_range = [&](long long dx, long long dy, long long& lo,
                                long long& hi) {
        const double A = static_cast<double>(dx * dx + dy * dy);
        const double B = 2.0 * static_cast<double>(m.x * dx + m.y * dy);
        const double C = static_cast<double>(norm2(m)) - R2;
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) {
            lo = 1;
            hi = 0;
            return;
        }
        const double sq = std::sqrt(disc);
        lo = static_cast<long long>(std::ceil((-B - sq) / (2.0 * A) - 1e-12));
        hi = static_cast<long long>(std::floor((-B + sq) / (2.0 * A) + 1e-12));
        // guard against rounding at the boundary
        while (lo <= hi && !in_window(m.x + lo * dx, m.y + lo * dy)) ++lo;
        while (lo <= hi && !in_window(m.x + hi * dx, m.y + hi * dy)) --hi;
    };

    std::vector<std::pair<IVec2, IVec2>> pairs;  // (n1, n3)
    const auto sites = window_sites(lat, radius);
    const bool m_inside = in_window(m.x, m.y);
    if (m_inside) {
        for (const IVec2& n3 : sites) pairs.emplace_back(m, n3);  // A = 0
        for (const IVec2& n1 : sites)                             // B = 0, A != 0
            if (!(n1 == m)) pairs.emplace_back(n1, m);
    }
    // A = s*d, B = u*perp(d), s,u != 0, d primitive in the right half-plane
    const long long dmax = static_cast<long long>(
        std::floor(R + std::sqrt(static_cast<double>(norm2(m))))) + 1;
    for (long long dx = 0; dx <= dmax; ++dx) {
        const long long dy_lo = dx == 0 ? 1 : -dmax;
        for (long long dy = dy_lo; dy <= dmax; ++dy) {
            if (dx == 0 && dy != 1) continue;
            if (dx > 0 && std::gcd(dx, std::llabs(dy)) != 1) continue;
            long long slo, shi, ulo, uhi;
            mult_range(dx, dy, slo, shi);
            if (slo > shi) continue;
            mult_range(-dy, dx, ulo, uhi);
            if (ulo > uhi) continue;
            for (long long s = slo; s <= shi; ++s) {
                if (s == 0) continue;
                const IVec2 n1{m.x + s * dx, m.y + s * dy};
                for (long long u = ulo; u <= uhi; ++u) {
                    if (u == 0) continue;
                    pairs.emplace_back(n1, IVec2{m.x - u * dy, m.y + u * dx});
                }
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        const auto key = [](const std::pair<IVec2, IVec2>& p) {
            return std::array<long long, 4>{p.first.x, p.first.y, p.second.x,
                                            p.second.y};
        };
        return key(a) < key(b);
    });
    ResonantLevel out;
    out.defect_num = 0;
    out.count = static_cast<long long>(pairs.size());
    Acc re, im;
    for (const auto& [n1, n3] : pairs) {
        const IVec2 n2{n1.x + n3.x - m.x, n1.y + n3.y - m.y};
        const cd w = pair_weight(zeta, n1, n2, n3);
        re.add(w.real());
        im.add(w.imag());
    }
    // fold the running compensation exactly the way the brute-force chunk
    // combiner does, so single-chunk runs match bit for bit
    Acc fre, fim;
    fre.add(re.s);
    fre.add(-re.c);
    fim.add(im.s);
    fim.add(-im.c);
    out.value = cd(fre.s, fim.s);
    return out;
}

cd kernel_sum(const LatticeSpec& lat, const std::vector<ResonantLevel>& levels,
              const std::function<cd(double)>& kernel,
              std::optional<cd> value_at_zero) {
    KahanComplex s;
    const double L2 = lat.L * lat.L;
    for (const ResonantLevel& lv : levels) {
        if (lv.defect_num == 0) {
            if (!value_at_zero)
                throw std::invalid_argument(
                    "kernel_sum: resonant stratum present but no kernel value at 0 "
                    "was supplied");
            s += lv.value * *value_at_zero;
        } else {
            s += lv.value * kernel(static_cast<double>(lv.defect_num) / L2);
        }
    }
    return s.value();
}

}  // namespace wavekin
