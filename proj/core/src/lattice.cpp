#include "wavekin/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/rng.hpp"

namespace wavekin {

double SpectralProfile::operator()(double k1, double k2) const {
    const double r2 = (k1 * k1 + k2 * k2) / (support_radius * support_radius);
    if (r2 >= 1.0) return 0.0;
    if (name == "bump") return std::exp(1.0 - 1.0 / (1.0 - r2));
    if (name == "gaussian")
        return std::exp(-(k1 * k1 + k2 * k2) / (2.0 * param * param));
    if (name == "plateau") {
        const double r = std::sqrt(r2) * support_radius;
        const double edge = param;
        if (r <= support_radius - edge) return 1.0;
        const double s = (support_radius - r) / edge;  // in (0,1)
        const double c = std::cos(0.5 * kPi * (1.0 - s));
        return c * c;
    }
    if (name == "const") return 1.0;
    throw std::invalid_argument("SpectralProfile: unknown profile " + name);
}

SpectralProfile make_profile(const std::string& name, double support_radius,
                             double param) {
    if (!(support_radius > 0.0))
        throw std::domain_error("make_profile: support_radius must be positive");
    SpectralProfile p;
    p.name = name;
    p.support_radius = support_radius;
    p.param = param;
    if (name == "gaussian" && !(param > 0.0))
        throw std::domain_error("make_profile: gaussian profile needs width param");
    if (name == "plateau" && !(param > 0.0 && param <= support_radius))
        throw std::domain_error("make_profile: plateau edge width out of range");
    (void)p(0.0, 0.0);  // validates the name
    return p;
}

std::vector<IVec2> window_sites(const LatticeSpec& lat, double radius) {
    if (!(lat.L > 0.0)) throw std::domain_error("window_sites: L must be positive");
    const double R = radius * lat.L;
    const long long n_max = static_cast<long long>(std::floor(R));
    std::vector<IVec2> out;
    for (long long i = -n_max; i <= n_max; ++i)
        for (long long j = -n_max; j <= n_max; ++j)
            if (static_cast<double>(i * i + j * j) <= R * R) out.push_back({i, j});
    return out;
}

double PhaseEnsemble::phase(std::uint64_t realization, const IVec2& site) const {
    // zig-zag pack the two signed coordinates into the counter word
    const auto zz = [](long long v) {
        return static_cast<std::uint64_t>((v << 1) ^ (v >> 63));
    };
    const std::uint64_t c = (zz(site.x) << 32) ^ zz(site.y);
    return kTwoPi * uniform01(seed, realization, c);
}

RegimeReport validate_regime(const ScalingParams& p, double strict_ratio) {
    RegimeReport r;
    // "much less" constraints demand ratio strictly below strict_ratio
    // (default 1: the boundary case itself fails); plain inequalities are
    // non-strict
    auto add = [&](const std::string& label, double ratio, double limit,
                   bool strict) {
        r.margins.emplace_back(label, ratio);
        const bool ok = strict ? ratio < limit : ratio <= limit;
        if (!ok) {
            r.ok = false;
            r.violations.push_back(label);
        }
    };
    if (!(p.L > 1.0 && p.h > 0.0 && p.sigma > 0.0)) {
        r.ok = false;
        r.violations.push_back("positivity: need L > 1, h > 0, sigma > 0");
        return r;
    }
    add("h*L^(4+delta0) <= 1", p.h * std::pow(p.L, 4.0 + p.delta0), 1.0, false);
    add("h*L << sigma", p.h * p.L / p.sigma, strict_ratio, true);
    add("sigma <= h^(3/4)", p.sigma / std::pow(p.h, 0.75), 1.0, false);
    if (p.eps > 0.0)
        add("eps << h^2/L", p.eps * p.L / (p.h * p.h), strict_ratio, true);
    const double d = 0.5 * p.delta0;
    r.window1_lo = std::pow(p.L, d);
    r.window1_hi = std::pow(p.L, 1.0 - d);
    r.window2_lo = std::pow(p.L, 2.0 + d);
    r.window2_hi = 1.0 / (p.h * std::pow(p.L, d));
    return r;
}

WavePacketSum build_phi(const ScalingParams& p, const SpectralProfile& eta,
                        const PhaseEnsemble* phases, std::uint64_t realization) {
    LatticeSpec lat{p.L};
    WavePacketSum phi;
    for (const IVec2& n : window_sites(lat, eta.support_radius)) {
        const double K1 = static_cast<double>(n.x) / p.L;
        const double K2 = static_cast<double>(n.y) / p.L;
        const double a = eta(K1, K2);
        if (a <= 0.0) continue;
        ComplexGaussian g = building_block(K1, K2, p.h);
        g.log_amp += std::log(a);
        if (phases) g.log_amp += cd(0.0, phases->phase(realization, n));
        phi.terms.push_back(g);
    }
    if (phi.terms.empty())
        throw std::domain_error("build_phi: profile vanishes on every lattice site");
    return phi;
}

cd coarse_grain(const WavePacketSum& v, double K1, double K2, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("coarse_grain: sigma must be positive");
    // <v>_{K,sigma} = (2pi)^3 sigma^2 \int conj(g_{K,sigma}) v dx
    const ComplexGaussian gbar = conjugate(building_block(K1, K2, sigma));
    KahanComplex s;
    for (const auto& t : v.terms) s += integrate_plane(product({gbar, t}, {}));
    const double pref = std::pow(kTwoPi, 3) * sigma * sigma;
    return pref * s.value();
}

cd coarse_grain_phi(const ScalingParams& p, const SpectralProfile& eta, double K1,
                    double K2, const PhaseEnsemble* phases,
                    std::uint64_t realization) {
    const double s2 = p.sigma * p.sigma, h2 = p.h * p.h;
    const double width = 2.0 * (s2 + h2);
    KahanComplex s;
    for (const IVec2& n : window_sites(LatticeSpec{p.L}, eta.support_radius)) {
        const double q1 = static_cast<double>(n.x) / p.L;
        const double q2 = static_cast<double>(n.y) / p.L;
        const double a = eta(q1, q2);
        if (a <= 0.0) continue;
        const double d2 = (K1 - q1) * (K1 - q1) + (K2 - q2) * (K2 - q2);
        cd z = a * std::exp(-d2 / width);
        if (phases) z *= std::exp(cd(0.0, phases->phase(realization, n)));
        s += z;
    }
    return (s2 / (s2 + h2)) * s.value();
}

}  // namespace wavekin
