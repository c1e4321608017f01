#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavekin/gaussian.hpp"

using namespace wavekin;

namespace {
double rel_err(cd got, cd want) {
    const double scale = std::max(std::abs(want), 1e-30);
    return std::abs(got - want) / scale;
}
}  // namespace

TEST_CASE("plane integral matches quadrature on random draws") {
    std::mt19937_64 rng(12345);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ComplexGaussian f = oracles::random_gaussian(rng);
        const cd got = integrate_plane(f);
        const cd want = oracles::plane_integral(f);
        worst = std::max(worst, rel_err(got, want));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("fourier transform matches quadrature at sample frequencies") {
    std::mt19937_64 rng(777);
    const double ks[5][2] = {{0, 0}, {1, 0}, {0, -2}, {1.5, 1.5}, {-0.7, 2.3}};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ComplexGaussian f = oracles::random_gaussian(rng);
        const ComplexGaussian fh = fourier_transform(f);
        for (auto& k : ks) {
            const cd got = fh.value(k[0], k[1]);
            const cd want = oracles::fourier_point(f, k[0], k[1]);
            worst = std::max(worst, rel_err(got, want));
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("fourier inversion recovers the coefficients") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
        const ComplexGaussian f = oracles::random_gaussian(rng);
        const ComplexGaussian g = inverse_fourier_transform(fourier_transform(f));
        CHECK(std::abs(g.quad - f.quad) <= 1e-12 * std::abs(f.quad));
        CHECK(std::abs(g.lin[0] - f.lin[0]) <= 1e-11);
        CHECK(std::abs(g.lin[1] - f.lin[1]) <= 1e-11);
        CHECK(std::abs(g.amplitude() - f.amplitude()) <=
              1e-11 * std::abs(f.amplitude()));
    }
}

TEST_CASE("free propagation matches the oscillatory frequency integral") {
    std::mt19937_64 rng(99);
    const double xs[4][2] = {{0, 0}, {1, -1}, {0.3, 2.0}, {-1.2, 0.4}};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const ComplexGaussian f = oracles::random_gaussian(rng);
        for (double t : {0.0, 0.1, -0.35, 2.0}) {
            const ComplexGaussian g = propagate(f, t);
            for (auto& x : xs) {
                const cd got = g.value(x[0], x[1]);
                const cd want = oracles::propagate_point(f, t, x[0], x[1]);
                worst = std::max(worst, rel_err(got, want));
            }
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("propagation is a group: e^{isD} e^{itD} = e^{i(s+t)D}") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const ComplexGaussian f = oracles::random_gaussian(rng);
        const double s = 0.7, t = -1.9;
        const ComplexGaussian a = propagate(propagate(f, s), t);
        const ComplexGaussian b = propagate(f, s + t);
        CHECK(std::abs(a.quad - b.quad) <= 1e-12 * std::abs(b.quad));
        CHECK(std::abs(a.lin[0] - b.lin[0]) <= 1e-11);
        CHECK(std::abs(a.lin[1] - b.lin[1]) <= 1e-11);
        CHECK(std::abs(a.amplitude() - b.amplitude()) <=
              1e-11 * std::abs(b.amplitude()));
    }
}

TEST_CASE("free flow preserves the L2 norm") {
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 10; ++i) {
        WavePacketSum f;
        f.terms.push_back(oracles::random_gaussian(rng));
        f.terms.push_back(oracles::random_gaussian(rng));
        const double n0 = norms(f).l2;
        const double n1 = norms(propagate(f, 1.3)).l2;
        CHECK(std::abs(n1 - n0) <= 1e-10 * n0);
    }
}

TEST_CASE("Plancherel for packet sums") {
    std::mt19937_64 rng(808);
    WavePacketSum u, v;
    for (int i = 0; i < 3; ++i) u.terms.push_back(oracles::random_gaussian(rng));
    for (int i = 0; i < 2; ++i) v.terms.push_back(oracles::random_gaussian(rng));
    const cd lhs = inner_product(u, v);
    const cd rhs = inner_product(fourier_transform(u), fourier_transform(v)) /
                   (kTwoPi * kTwoPi);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("products evaluate pointwise, with conjugation masks") {
    std::mt19937_64 rng(2024);
    const ComplexGaussian a = oracles::random_gaussian(rng);
    const ComplexGaussian b = oracles::random_gaussian(rng);
    const ComplexGaussian c = oracles::random_gaussian(rng);
    const ComplexGaussian p = product({a, b, c}, {false, true, false});
    const double xs[3][2] = {{0.2, -0.1}, {1.0, 1.0}, {-0.5, 0.8}};
    for (auto& x : xs) {
        const cd want =
            a.value(x[0], x[1]) * std::conj(b.value(x[0], x[1])) * c.value(x[0], x[1]);
        CHECK(std::abs(p.value(x[0], x[1]) - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("second moments match quadrature") {
    std::mt19937_64 rng(63);
    const ComplexGaussian f = oracles::random_gaussian(rng);
    const int pows[5][2] = {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
    for (auto& p : pows) {
        auto [ax, bx] = oracles::axis_box(f.quad, f.lin[0]);
        auto [ay, by] = oracles::axis_box(f.quad, f.lin[1]);
        const cd want = oracles::box_integral2d(
            [&](double x, double y) {
                return std::pow(x, p[0]) * std::pow(y, p[1]) * f.value(x, y);
            },
            ax, bx, ay, by, 1e-10);
        const cd got = integrate_moment(f, p[0], p[1]);
        CHECK(std::abs(got - want) <= 1e-7 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("Sigma norm of a small packet matches direct quadrature") {
    std::mt19937_64 rng(17);
    WavePacketSum f;
    f.terms.push_back(oracles::random_gaussian(rng));
    f.terms.push_back(oracles::random_gaussian(rng));
    const PacketNorms got = norms(f);

    auto quad_norm = [&](auto&& weight) {
        // integrate |weight(x) f(x)|^2-type densities on a generous box
        const cd val = oracles::box_integral2d(
            [&](double x, double y) { return weight(x, y); }, -12.0, 12.0, -12.0,
            12.0, 1e-9);
        return std::sqrt(val.real());
    };
    const double l2 = quad_norm([&](double x, double y) {
        const cd v = evaluate(f, x, y);
        return cd(std::norm(v), 0.0);
    });
    const double xl2 = quad_norm([&](double x, double y) {
        const cd v = evaluate(f, x, y);
        return cd((x * x + y * y) * std::norm(v), 0.0);
    });
    const double h = 1e-4;
    const double gl2 = quad_norm([&](double x, double y) {
        const cd dx = (evaluate(f, x + h, y) - evaluate(f, x - h, y)) / (2 * h);
        const cd dy = (evaluate(f, x, y + h) - evaluate(f, x, y - h)) / (2 * h);
        return cd(std::norm(dx) + std::norm(dy), 0.0);
    });
    CHECK(std::abs(got.l2 - l2) <= 1e-6 * l2);
    CHECK(std::abs(got.moment_l2 - xl2) <= 1e-6 * xl2);
    CHECK(std::abs(got.grad_l2 - gl2) <= 1e-5 * gl2);
    CHECK(got.sigma ==
          doctest::Approx(std::sqrt(got.l2 * got.l2 + got.grad_l2 * got.grad_l2 +
                                    got.moment_l2 * got.moment_l2)));
}

TEST_CASE("building block has the right normalization and frequency") {
    const ComplexGaussian g = building_block(2.0, -1.0, 0.3);
    CHECK(g.value(0, 0).real() == doctest::Approx(1.0 / (kTwoPi * kTwoPi)));
    CHECK(g.value(0, 0).imag() == doctest::Approx(0.0));
    // modulus depends only on |x|, phase advances like K.x
    const cd v = g.value(1.0, 0.5);
    const double r2 = 1.0 + 0.25;
    CHECK(std::abs(v) ==
          doctest::Approx(std::exp(-0.09 * r2 / 2.0) / (kTwoPi * kTwoPi)));
    CHECK(std::arg(v) == doctest::Approx(2.0 * 1.0 - 1.0 * 0.5));
    // frequency content concentrates at K: fhat peaks there
    const ComplexGaussian gh = fourier_transform(g);
    CHECK(std::abs(gh.value(2.0, -1.0)) > std::abs(gh.value(0.0, 0.0)));
    CHECK(std::abs(gh.value(2.0, -1.0)) ==
          doctest::Approx(1.0 / (kTwoPi * 0.09)).epsilon(1e-10));
}

TEST_CASE("invalid quadratic coefficients are rejected") {
    CHECK_THROWS_AS(make_gaussian(cd(1, 0), cd(0.0, 1.0), {cd(0), cd(0)}),
                    std::domain_error);
    CHECK_THROWS_AS(make_gaussian(cd(1, 0), cd(-0.5, 0.0), {cd(0), cd(0)}),
                    std::domain_error);
}

TEST_CASE("product term cap throws length_error") {
    std::mt19937_64 rng(3);
    WavePacketSum a, b;
    for (int i = 0; i < 40; ++i) {
        a.terms.push_back(oracles::random_gaussian(rng));
        b.terms.push_back(oracles::random_gaussian(rng));
    }
    CHECK_THROWS_AS(product(a, b, false, 1000), std::length_error);
    CHECK_NOTHROW(product(a, b, false, 1600));
}
