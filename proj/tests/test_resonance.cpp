#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>

#include "oracles.hpp"
#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/resonance.hpp"

using namespace wavekin;

TEST_CASE("triple enumeration covers the window and the defect is exact") {
    const LatticeSpec lat{4.0};
    const IVec2 m{1, -1};
    const auto triples = enumerate_triples(lat, 1.0, m);
    // brute force over an oversized window
    std::size_t cnt = 0;
    for (long long a = -6; a <= 6; ++a)
        for (long long b = -6; b <= 6; ++b)
            for (long long c = -6; c <= 6; ++c)
                for (long long d = -6; d <= 6; ++d)
                    if (a * a + b * b <= 16 && c * c + d * d <= 16) ++cnt;
    REQUIRE(triples.size() == cnt);
    for (const auto& t : triples) {
        CHECK(t.n2.x == t.n1.x + t.n3.x - m.x);
        CHECK(t.n2.y == t.n1.y + t.n3.y - m.y);
        const long long dn =
            norm2(m) - norm2(t.n1) + norm2(t.n2) - norm2(t.n3);
        CHECK(t.defect_num == dn);
    }
    CHECK_THROWS_AS(enumerate_triples(lat, 1.0, m, 10), std::length_error);
}

TEST_CASE("L=1 box radius 1.5 around the origin has 33 resonant pairs") {
    const LatticeSpec lat{1.0};
    const auto triples = enumerate_triples(lat, 1.5, IVec2{0, 0});
    CHECK(triples.size() == 81);  // 9 choices of K1 x 9 of K3
    std::size_t resonant = 0;
    for (const auto& t : triples)
        if (t.defect_num == 0) ++resonant;
    CHECK(resonant == 33);
}

namespace {
SiteTable random_table(const LatticeSpec& lat, double radius, std::uint64_t seed) {
    const SpectralProfile eta = make_profile("bump", radius);
    const PhaseEnsemble pe{seed};
    const long long hw = static_cast<long long>(std::floor(radius * lat.L)) + 1;
    return make_site_table(lat, eta, hw, &pe, 0);
}
}  // namespace

TEST_CASE("level sets partition the triples and reproduce a direct sum") {
    const LatticeSpec lat{3.0};
    const IVec2 m{1, 0};
    const double R = 1.0;
    const SiteTable z = random_table(lat, R, 11);
    const auto levels = level_set_profile(lat, z, m, R);

    std::map<long long, std::pair<long long, cd>> want;
    for (const auto& t : enumerate_triples(lat, R, m)) {
        auto& w = want[t.defect_num];
        w.first += 1;
        w.second += z.at(t.n1.x, t.n1.y) * std::conj(z.at(t.n2.x, t.n2.y)) *
                    z.at(t.n3.x, t.n3.y);
    }
    REQUIRE(levels.size() == want.size());
    long long total = 0;
    for (const auto& lv : levels) {
        REQUIRE(want.count(lv.defect_num) == 1);
        const auto& w = want[lv.defect_num];
        CHECK(lv.count == w.first);
        CHECK(std::abs(lv.value - w.second) <= 1e-12 * std::max(1.0, std::abs(w.second)));
        total += lv.count;
    }
    CHECK(total == static_cast<long long>(enumerate_triples(lat, R, m).size()));
    // sorted by (|defect|, defect)
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const auto a = levels[i - 1].defect_num, b = levels[i].defect_num;
        CHECK((std::llabs(a) < std::llabs(b) ||
               (std::llabs(a) == std::llabs(b) && a < b)));
    }
}

TEST_CASE("fast resonant stratum is bitwise equal to the brute-force one") {
    for (double L : {1.0, 3.0, 8.0, 16.0}) {
        const LatticeSpec lat{L};
        for (const IVec2 m : {IVec2{0, 0}, IVec2{1, 2}, IVec2{-3, 1}}) {
            const SiteTable z = random_table(lat, 1.2, 5 + static_cast<int>(L));
            const ResonantLevel fast = resonant_level_fast(lat, z, m, 1.2);
            const auto levels = level_set_profile(lat, z, m, 1.2);
            const ResonantLevel* brute = nullptr;
            for (const auto& lv : levels)
                if (lv.defect_num == 0) brute = &lv;
            if (brute == nullptr) {
                // no resonant triples in the window at this (L, m)
                CHECK(fast.count == 0);
                CHECK(fast.value == cd(0.0, 0.0));
                continue;
            }
            CHECK(fast.count == brute->count);
            CHECK(std::memcmp(&fast.value, &brute->value, sizeof(cd)) == 0);
        }
    }
}

TEST_CASE("level profile is invariant under the thread count") {
    const LatticeSpec lat{12.0};
    const SiteTable z = random_table(lat, 1.0, 99);
    set_thread_count(1);
    const auto a = level_set_profile(lat, z, IVec2{2, -1}, 1.0);
    set_thread_count(7);
    const auto b = level_set_profile(lat, z, IVec2{2, -1}, 1.0);
    set_thread_count(0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].defect_num == b[i].defect_num);
        CHECK(a[i].count == b[i].count);
        CHECK(std::memcmp(&a[i].value, &b[i].value, sizeof(cd)) == 0);
    }
}

TEST_CASE("kernel sums weight the levels and guard the resonant stratum") {
    const LatticeSpec lat{3.0};
    const SiteTable z = random_table(lat, 1.0, 2);
    const auto levels = level_set_profile(lat, z, IVec2{0, 0}, 1.0);
    const auto kern = [](double dw) { return cd(1.0 / (1.0 + dw * dw), 0.0); };
    const cd got = kernel_sum(lat, levels, kern, cd(1.0));
    KahanComplex want;
    for (const auto& lv : levels) {
        const double dw = static_cast<double>(lv.defect_num) / (lat.L * lat.L);
        want += lv.value * kern(dw);
    }
    CHECK(std::abs(got - want.value()) <= 1e-12 * std::max(1.0, std::abs(got)));
    CHECK_THROWS_AS(kernel_sum(lat, levels, kern, std::nullopt),
                    std::invalid_argument);
}
