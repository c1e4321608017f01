#include "wavekin/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "wavekin/kahan.hpp"

namespace wavekin {

cd ComplexGaussian::value(double x1, double x2) const {
    const cd e = log_amp - quad * cd(x1 * x1 + x2 * x2) + lin[0] * x1 + lin[1] * x2;
    return std::exp(e);
}

ComplexGaussian make_gaussian(cd amplitude, cd quad, const cvec2& lin) {
    if (!(quad.real() > 0.0))
        throw std::domain_error("make_gaussian: Re(quad) must be positive");
    if (amplitude == cd(0.0))
        throw std::domain_error("make_gaussian: zero amplitude");
    ComplexGaussian g;
    g.log_amp = std::log(amplitude);
    g.quad = quad;
    g.lin = lin;
    return g;
}

ComplexGaussian building_block(double k1, double k2, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("building_block: eps must be positive");
    ComplexGaussian g;
    g.log_amp = cd(-std::log(4.0 * kPi * kPi), 0.0);
    g.quad = cd(0.5 * eps * eps, 0.0);
    g.lin = {cd(0.0, k1), cd(0.0, k2)};
    return g;
}

ComplexGaussian conjugate(const ComplexGaussian& f) {
    ComplexGaussian g;
    g.log_amp = std::conj(f.log_amp);
    g.quad = std::conj(f.quad);
    g.lin = {std::conj(f.lin[0]), std::conj(f.lin[1])};
    return g;
}

// \int e^{-z|x|^2 + xi.x} dx = (pi/z) e^{xi.xi/(4z)}  (Re z > 0, xi in C^2)
static cd log_plane_integral(cd z, const cvec2& xi) {
    return std::log(kPi / z) + cdot(xi, xi) / (4.0 * z);
}

ComplexGaussian fourier_transform(const ComplexGaussian& f) {
    if (!f.integrable())
        throw std::domain_error("fourier_transform: Re(quad) <= 0");
    const cd z = f.quad;
    ComplexGaussian g;
    g.quad = 1.0 / (4.0 * z);
    g.lin = (cd(0.0, -1.0) / (2.0 * z)) * f.lin;
    g.log_amp = f.log_amp + std::log(kPi / z) + cdot(f.lin, f.lin) / (4.0 * z);
    return g;
}

ComplexGaussian inverse_fourier_transform(const ComplexGaussian& f) {
    if (!f.integrable())
        throw std::domain_error("inverse_fourier_transform: Re(quad) <= 0");
    const cd z = f.quad;
    ComplexGaussian g;
    g.quad = 1.0 / (4.0 * z);
    g.lin = (cd(0.0, 1.0) / (2.0 * z)) * f.lin;
    g.log_amp = f.log_amp + std::log(kPi / z) + cdot(f.lin, f.lin) / (4.0 * z) -
                std::log(cd(4.0 * kPi * kPi));
    return g;
}

ComplexGaussian propagate(const ComplexGaussian& f, double t) {
    const cd z = f.quad;
    const cd d = 1.0 + cd(0.0, 4.0 * t) * z;
    // Re(z/d) = Re(z)/|d|^2 > 0, so propagation preserves integrability
    ComplexGaussian g;
    g.quad = z / d;
    g.lin = (1.0 / d) * f.lin;
    g.log_amp = f.log_amp - std::log(d) + (cd(0.0, t) / d) * cdot(f.lin, f.lin);
    return g;
}

ComplexGaussian product(const std::vector<ComplexGaussian>& fs,
                        const std::vector<bool>& conj_mask) {
    if (fs.empty()) throw std::invalid_argument("product: empty factor list");
    if (!conj_mask.empty() && conj_mask.size() != fs.size())
        throw std::invalid_argument("product: mask size mismatch");
    ComplexGaussian g;
    g.log_amp = cd(0.0);
    g.quad = cd(0.0);
    g.lin = {cd(0.0), cd(0.0)};
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const bool c = !conj_mask.empty() && conj_mask[i];
        const ComplexGaussian& f = fs[i];
        g.log_amp += c ? std::conj(f.log_amp) : f.log_amp;
        g.quad += c ? std::conj(f.quad) : f.quad;
        g.lin[0] += c ? std::conj(f.lin[0]) : f.lin[0];
        g.lin[1] += c ? std::conj(f.lin[1]) : f.lin[1];
    }
    return g;
}

cd log_integrate_plane(const ComplexGaussian& f) {
    if (!f.integrable())
        throw std::domain_error("integrate_plane: Re(quad) <= 0, not integrable");
    return f.log_amp + log_plane_integral(f.quad, f.lin);
}

cd integrate_plane(const ComplexGaussian& f) { return std::exp(log_integrate_plane(f)); }

cd integrate_moment(const ComplexGaussian& f, int p1, int p2) {
    if (p1 < 0 || p2 < 0 || p1 + p2 > 2)
        throw std::invalid_argument("integrate_moment: order must be <= 2");
    const cd I0 = integrate_plane(f);
    const cd z = f.quad;
    const cd m1 = f.lin[0] / (2.0 * z);  // first-moment means, from d/dxi of the
    const cd m2 = f.lin[1] / (2.0 * z);  // plane-integral closed form
    if (p1 + p2 == 0) return I0;
    if (p1 == 1 && p2 == 0) return m1 * I0;
    if (p1 == 0 && p2 == 1) return m2 * I0;
    if (p1 == 2) return (1.0 / (2.0 * z) + m1 * m1) * I0;
    if (p2 == 2) return (1.0 / (2.0 * z) + m2 * m2) * I0;
    return m1 * m2 * I0;  // p1 == p2 == 1
}

WavePacketSum conjugate(const WavePacketSum& f) {
    WavePacketSum g;
    g.terms.reserve(f.terms.size());
    for (const auto& t : f.terms) g.terms.push_back(conjugate(t));
    return g;
}

WavePacketSum propagate(const WavePacketSum& f, double t) {
    WavePacketSum g;
    g.terms.reserve(f.terms.size());
    for (const auto& x : f.terms) g.terms.push_back(propagate(x, t));
    return g;
}

WavePacketSum fourier_transform(const WavePacketSum& f) {
    WavePacketSum g;
    g.terms.reserve(f.terms.size());
    for (const auto& x : f.terms) g.terms.push_back(fourier_transform(x));
    return g;
}

WavePacketSum product(const WavePacketSum& a, const WavePacketSum& b, bool conj_b,
                      std::size_t term_cap) {
    if (a.terms.size() * b.terms.size() > term_cap)
        throw std::length_error("product: term budget exceeded");
    WavePacketSum g;
    g.terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& x : a.terms)
        for (const auto& y : b.terms)
            g.terms.push_back(product({x, y}, {false, conj_b}));
    return g;
}

cd evaluate(const WavePacketSum& f, double x1, double x2) {
    KahanComplex s;
    for (const auto& t : f.terms) s += t.value(x1, x2);
    return s.value();
}

cd integrate_plane(const WavePacketSum& f) {
    KahanComplex s;
    for (const auto& t : f.terms) s += integrate_plane(t);
    return s.value();
}

cd inner_product(const WavePacketSum& u, const WavePacketSum& v) {
    KahanComplex s;
    for (const auto& a : u.terms)
        for (const auto& b : v.terms)
            s += integrate_plane(product({a, b}, {false, true}));
    return s.value();
}

PacketNorms norms(const WavePacketSum& f) {
    KahanReal l2, grad, mom;
    for (const auto& a : f.terms) {
        for (const auto& b : f.terms) {
            const ComplexGaussian g = product({a, b}, {false, true});
            l2 += integrate_plane(g).real();
            // d_j a = (-2 z_a x_j + xi_aj) a, similarly for conj(b); expand the
            // degree-2 polynomial against the pair Gaussian g
            const cd za = a.quad, zbc = std::conj(b.quad);
            for (int j = 0; j < 2; ++j) {
                const cd xa = a.lin[static_cast<std::size_t>(j)];
                const cd xbc = std::conj(b.lin[static_cast<std::size_t>(j)]);
                const int p1 = j == 0 ? 1 : 0, p2 = 1 - p1;
                cd v = 4.0 * za * zbc * integrate_moment(g, 2 * p1, 2 * p2);
                v -= (2.0 * za * xbc + 2.0 * zbc * xa) * integrate_moment(g, p1, p2);
                v += xa * xbc * integrate_plane(g);
                grad += v.real();
            }
            mom += (integrate_moment(g, 2, 0) + integrate_moment(g, 0, 2)).real();
        }
    }
    PacketNorms n;
    n.l2 = std::sqrt(std::max(0.0, l2.value()));
    n.grad_l2 = std::sqrt(std::max(0.0, grad.value()));
    n.moment_l2 = std::sqrt(std::max(0.0, mom.value()));
    n.sigma = std::sqrt(l2.value() + grad.value() + mom.value());
    return n;
}

}  // namespace wavekin
