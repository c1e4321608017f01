#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "wavekin/duhamel.hpp"
#include "wavekin/lattice.hpp"

namespace wavekin {

// E[ prod_j zeta_{K_j}^{(conj?)} ] for i.i.d. uniform phases is 1 when the
// conjugated sites form the same multiset as the unconjugated ones, else 0
int pairing_expectation(const std::vector<std::pair<IVec2, bool>>& legs);

// closed pairing formulas (exact, no sampling):
// E |<phi>_{K,sigma}|^2
double phi_second_moment(const ScalingParams& p, const SpectralProfile& eta,
                         IVec2 mK);
// E |V1_leading|^2  (sum over pairs of mode triples with multiset matching)
double v1_second_moment(const ScalingParams& p, const SpectralProfile& eta,
                        IVec2 mK, double t);

struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

struct EnsembleOptions {
    std::size_t n_realizations = 10000;
    std::array<double, 3> eps{0.02, 0.014142135623730951, 0.01};
    bool include_v2 = true;
    bool antisym = false;  // also evaluate at -t with the same phases
    std::uint64_t seed = 1;
};

struct LadderFit {
    // E|<v>|^2 = c[0] eps^2 + c[1] eps^4 + c[2] eps^6; the Vandermonde solve
    // runs per realization (the ladder shares each phase draw) and the
    // coefficients are averaged, so coeff_err reflects the correlated noise
    std::array<double, 3> coeff{};
    std::array<double, 3> coeff_err{};
};

struct EnsembleResult {
    std::array<double, 3> eps{};
    std::array<MomentEstimate, 3> abs2_fwd{};   // E|<v(t)>|^2 per ladder point
    std::array<MomentEstimate, 3> abs2_bwd{};   // at -t (antisym runs)
    LadderFit fit_fwd, fit_bwd;
    double phi_abs2_exact = 0.0;     // closed pairing value of E|<phi>|^2
    MomentEstimate phi_abs2_mc{};    // sampled E|<phi>|^2 (eps factored out)
    double v1_abs2_exact = 0.0;      // closed pairing value of E|V1|^2
    MomentEstimate v1_abs2_mc{};     // sampled E|V1|^2
    MomentEstimate cross_abs{};      // |E[<v>_K conj(<v>_K')]| - |E..||E..| bound
};

// random-phase Monte Carlo of <v(t)> ~ eps<phi> - i eps^3 V1 - eps^5 V2 using
// the leading kernels; one phase stream drives every ladder point
EnsembleResult variance_mc(const ScalingParams& p, const SpectralProfile& eta,
                           IVec2 mK, double t, const EnsembleOptions& opt,
                           const IVec2* mKprime = nullptr);

// lattice collision-bracket sum: over quadruples K = K1 - K2 + K3 whose three
// legs all carry positive spectrum,
//   [n1 n2 n3 - n n2 n3 + n n1 n3 - n n1 n2] * |E_t(defect)|^2
double kinetic_sum(const ScalingParams& p, const SpectralProfile& n, IVec2 mK,
                   double t);

}  // namespace wavekin
