#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "wavekin/lattice.hpp"
#include "wavekin/resonance.hpp"

namespace wavekin {

// beta_eps(s) = 1 / (1 + 2 i s eps^2)
inline cd beta_factor(double s, double eps) {
    return 1.0 / cd(1.0, 2.0 * s * eps * eps);
}

// E_t(x) = \int_0^t e^{i s x} ds; the x == 0 branch is selected exactly by the
// caller (defects are integer-classified), never by a floating comparison
cd osc_kernel(double t, double x);
inline cd osc_kernel_zero(double t) { return {t, 0.0}; }

// \int_0^t \int_0^s e^{i s a} e^{i sign s' b} ds' ds with exact degeneracy
// branches: b == 0, a + sign*b == 0, a == 0 are decided from the integer
// defect numerators
cd double_osc_kernel(double t, double a, double b, int sign, bool a_zero,
                     bool b_zero, bool a_plus_sign_b_zero);

// closed-form time kernel of the first expansion term for one mode quadruple:
// the x-integral of conj(e^{isD}g_{K,sigma}) e^{isD}g_{K1,h}
// conj(e^{isD}g_{K2,h}) e^{isD}g_{K3,h}
cd w1_kernel(const ScalingParams& p, double K1x, double K1y, double K2x,
             double K2y, double K3x, double K3y, double Kx, double Ky, double s);
// same quantity assembled through the generic Gaussian pipeline (cross-check)
cd w1_kernel_reference(const ScalingParams& p, double K1x, double K1y, double K2x,
                       double K2y, double K3x, double K3y, double Kx, double Ky,
                       double s);

struct ExpansionOptions {
    double quad_rel_tol = 1e-10;
    // skip mode triples whose momentum-mismatch Gaussian factor is below
    // e^{-cutoff} at s=0 (the factor only shrinks the contribution further)
    double mismatch_exponent_cutoff = 46.0;
    std::size_t budget = 10000000;
};

struct ExpansionValue {
    cd value{0.0, 0.0};
    std::size_t terms_used = 0;
    std::size_t terms_pruned = 0;
};

// <V^1(t)>_{K,sigma}: exact first expansion term, all mode triples in the
// support window, closed-form s-kernel integrated adaptively
ExpansionValue v1_exact(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t, const ExpansionOptions& opt = {},
                        const PhaseEnsemble* phases = nullptr,
                        std::uint64_t realization = 0);

// leading-order first term: (2pi)^-4 sum over K = K1 - K2 + K3 of
// zeta1 conj(zeta2) zeta3 E_t(defect)
cd v1_leading(const ScalingParams& p, const SpectralProfile& eta, IVec2 mK,
              double t, const PhaseEnsemble* phases = nullptr,
              std::uint64_t realization = 0);

// enumeration of the two second-order pairing structures.  fn receives the
// five weighted legs (site, sign) with sign +1 for zeta and -1 for conj(zeta),
// the outer and inner defect numerators (units 1/L^2), the sign of the inner
// time phase, and the multiplicity weight.
using QuintupleFn = std::function<void(
    const std::array<IVec2, 5>&, const std::array<int, 5>&, long long, long long,
    int, int)>;
void for_each_quintuple(const LatticeSpec& lat, double radius, IVec2 mK,
                        const QuintupleFn& fn);

// leading-order second term: (2pi)^-8 sum over both structures of the
// zeta-products times the closed double-time kernels
cd v2_leading(const ScalingParams& p, const SpectralProfile& eta, IVec2 mK,
              double t, const PhaseEnsemble* phases = nullptr,
              std::uint64_t realization = 0);

// exact second expansion term through the Gaussian pipeline with adaptive
// double time quadrature; O(M^5), guarded by `budget` quintuples
ExpansionValue v2_exact(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t, double quad_rel_tol = 1e-8,
                        std::size_t budget = 200000,
                        const PhaseEnsemble* phases = nullptr,
                        std::uint64_t realization = 0);

// R_k(t) = \int\int e^{2 i t a.b} u(k+a) conj(v(k+b)) w(k+a+b) da db in closed
// form (nested 2-D Gaussian integrals; the bilinear coupling joins the two
// quadratic forms).  u, v, w are frequency-side Gaussian packets.  Throws
// std::domain_error if the coupled quadratic form loses positivity.
cd trilinear_decay(const WavePacketSum& u, const WavePacketSum& v,
                   const WavePacketSum& w, double k1, double k2, double t);

std::vector<cd> decay_profile(const WavePacketSum& u, const WavePacketSum& v,
                              const WavePacketSum& w, double k1, double k2,
                              const std::vector<double>& times);

}  // namespace wavekin
