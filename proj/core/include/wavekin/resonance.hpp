#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wavekin/lattice.hpp"

namespace wavekin {

// dense table of mode amplitudes zeta(n) = eta(n/L) e^{i theta_n} on the
// integer box |n_x|,|n_y| <= half_width; zero outside
struct SiteTable {
    long long half_width = 0;
    std::vector<cd> vals;
    cd at(long long x, long long y) const {
        if (x < -half_width || x > half_width || y < -half_width || y > half_width)
            return {0.0, 0.0};
        const std::size_t idx = static_cast<std::size_t>((x + half_width) *
                                    (2 * half_width + 1) + (y + half_width));
        return vals[idx];
    }
};

SiteTable make_site_table(const LatticeSpec& lat, const SpectralProfile& eta,
                          long long half_width, const PhaseEnsemble* phases = nullptr,
                          std::uint64_t realization = 0);

// quadruple (K, K1, K2, K3) with K = K1 - K2 + K3, stored as integer site
// coordinates; the dispersion defect
//   dw = |K|^2 - |K1|^2 + |K2|^2 - |K3|^2 = defect_num / L^2
// is exact integer arithmetic (defect_num = 2 A.B for K1 = K+A, K3 = K+B)
struct Triple {
    IVec2 n1, n2, n3;
    long long defect_num = 0;
};

// all (K1,K3) in the window |K1|,|K3| <= radius with K2 = K1 + K3 - K;
// throws std::length_error beyond `budget` triples
std::vector<Triple> enumerate_triples(const LatticeSpec& lat, double radius,
                                      IVec2 m, std::size_t budget = 100000000);

// one level set of the defect: sum of zeta(K1) conj(zeta(K2)) zeta(K3) over
// the triples with a fixed defect_num, plus the raw triple count
struct ResonantLevel {
    long long defect_num = 0;
    long long count = 0;
    cd value{0.0, 0.0};
};

// every nonempty level, sorted by (|defect|, defect); O(M^2) enumeration with
// per-level compensated accumulation in lexicographic (K1, K3) order
std::vector<ResonantLevel> level_set_profile(const LatticeSpec& lat,
                                             const SiteTable& zeta, IVec2 m,
                                             double radius);

// the defect = 0 stratum only, via the primitive-direction factorization of
// A.B = 0 (O(M^1.5 polylog) pairs); bitwise-reproducible lex summation order
ResonantLevel resonant_level_fast(const LatticeSpec& lat, const SiteTable& zeta,
                                  IVec2 m, double radius);

// sum_levels value(level) * kernel(defect); the kernel value at defect 0 must
// be supplied explicitly by the caller (degenerate limits differ per kernel)
cd kernel_sum(const LatticeSpec& lat, const std::vector<ResonantLevel>& levels,
              const std::function<cd(double)>& kernel,
              std::optional<cd> value_at_zero);

}  // namespace wavekin
