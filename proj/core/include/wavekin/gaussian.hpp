#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace wavekin {

using cd = std::complex<double>;
using cvec2 = std::array<cd, 2>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// bilinear (no conjugation) dot product on C^2
inline cd cdot(const cvec2& a, const cvec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline cvec2 operator+(const cvec2& a, const cvec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline cvec2 operator*(cd s, const cvec2& a) { return {s * a[0], s * a[1]}; }

// x |-> exp(log_amp) * exp(-quad*|x|^2 + lin.x),  x in R^2, Re(quad) > 0.
//
// The scalar prefactor is carried in log form: products of many sharply
// concentrated terms would overflow/underflow the double range long before
// the combined exponent stops being meaningful.
struct ComplexGaussian {
    cd log_amp{0.0, 0.0};
    cd quad{1.0, 0.0};
    cvec2 lin{cd{0.0}, cd{0.0}};

    cd amplitude() const { return std::exp(log_amp); }
    bool integrable() const { return quad.real() > 0.0; }
    cd value(double x1, double x2) const;
};

// amplitude given linearly; throws std::domain_error unless Re(quad) > 0
ComplexGaussian make_gaussian(cd amplitude, cd quad, const cvec2& lin);

// g_{K,eps}(x) = (2pi)^-2 e^{iK.x} e^{-eps^2|x|^2/2}
ComplexGaussian building_block(double k1, double k2, double eps);

ComplexGaussian conjugate(const ComplexGaussian& f);

// convention: fhat(k) = \int f(x) e^{-ik.x} dx,  f(x) = (2pi)^-2 \int fhat(k) e^{ik.x} dk
ComplexGaussian fourier_transform(const ComplexGaussian& f);
ComplexGaussian inverse_fourier_transform(const ComplexGaussian& f);

// e^{itD}f for the free Schrodinger flow i u_t = -D u (D = Laplacian); exact
// closed form, valid for all real t, no branch tracking needed in d=2
ComplexGaussian propagate(const ComplexGaussian& f, double t);

// pointwise product; entries with conj_mask[i] set enter conjugated
ComplexGaussian product(const std::vector<ComplexGaussian>& fs,
                        const std::vector<bool>& conj_mask);

// \int_{R^2} f dx  (and the log of it, for deep products)
cd integrate_plane(const ComplexGaussian& f);
cd log_integrate_plane(const ComplexGaussian& f);

// \int x1^p1 x2^p2 f dx for p1+p2 <= 2 (used by the Sigma-norm bookkeeping)
cd integrate_moment(const ComplexGaussian& f, int p1, int p2);

// finite sum of Gaussian terms
struct WavePacketSum {
    std::vector<ComplexGaussian> terms;
};

// hard cap on term count after products (documented guard; throws
// std::length_error when exceeded)
inline constexpr std::size_t kDefaultTermCap = 1000000;

WavePacketSum conjugate(const WavePacketSum& f);
WavePacketSum propagate(const WavePacketSum& f, double t);
WavePacketSum fourier_transform(const WavePacketSum& f);
WavePacketSum product(const WavePacketSum& a, const WavePacketSum& b,
                      bool conj_b = false, std::size_t term_cap = kDefaultTermCap);
cd evaluate(const WavePacketSum& f, double x1, double x2);
cd integrate_plane(const WavePacketSum& f);

struct PacketNorms {
    double l2 = 0;        // ||f||_{L^2}
    double grad_l2 = 0;   // ||grad f||_{L^2}
    double moment_l2 = 0; // || |x| f ||_{L^2}
    double sigma = 0;     // sqrt(l2^2 + grad_l2^2 + moment_l2^2)
};
PacketNorms norms(const WavePacketSum& f);

// <u, v> = \int u conj(v) dx over all term pairs
cd inner_product(const WavePacketSum& u, const WavePacketSum& v);

}  // namespace wavekin
