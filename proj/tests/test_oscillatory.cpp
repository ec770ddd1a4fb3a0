#include "deltasum/error.hpp"
#include "deltasum/oscillatory.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace deltasum;

namespace {

// J_nu(x) from the first 30 terms of the power series, in long double.
long double series_j(int nu, long double x) {
    long double term = 1.0L;
    for (int j = 1; j <= nu; ++j) term *= x / 2.0L / j;
    long double s = 0.0L;
    for (int k = 0; k < 30; ++k) {
        s += term;
        term *= -(x * x / 4.0L) / ((k + 1.0L) * (k + 1.0L + nu));
    }
    return s;
}

// Composite Simpson over the support of V with n panels.
ComplexValue simpson(const IntegralParams& P, const WindowFunction& V, int n) {
    const double a = V.support_begin(), b = V.support_end(), h = (b - a) / n;
    const double denom = double(P.c) * double(P.p) * double(P.M);
    auto f = [&](double y) {
        const double phase = std::fmod((P.N * double(P.l) * y + double(P.n) * double(P.l)) / denom, 1.0);
        const double arg = 4.0 * std::numbers::pi * std::sqrt(P.N * double(P.n) * double(P.l * P.l) * y) / denom;
        return std::polar(1.0, 2.0 * std::numbers::pi * phase) * std::cyl_bessel_j(double(P.k - 1), arg) * V(y);
    };
    ComplexValue s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

IntegralParams moderate() {
    IntegralParams P;
    P.N = 1e4;
    P.n = 100;
    P.l = 3;
    P.c = 1;
    P.p = 11;
    P.M = 100;
    P.k = 11;
    return P;
}

}  // namespace

TEST_SUITE("oscillatory") {

TEST_CASE("bessel_j examples") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    for (int nu = 1; nu <= 200; nu += 7) CHECK(bessel_j(nu, 0.0) == 0.0);
    const double j2 = double(series_j(2, 1.0L));
    CHECK(std::abs(bessel_j(2, 1.0) - j2) <= 1e-15);
    CHECK(std::abs(j2 - 0.1149034849319005) < 1e-15);
    CHECK_THROWS_AS(bessel_j(201, 1.0), Error);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), Error);
    CHECK_THROWS_AS(bessel_j(2, -0.5), Error);
    CHECK_THROWS_AS(bessel_j(2, std::nan("")), Error);
}

TEST_CASE("bessel_j against the series below the order") {
    for (int nu = 0; nu <= 60; nu += 3)
        for (double x : {0.01, 0.3, 1.0, 2.5, 4.0}) {
            const double want = double(series_j(nu, x));
            REQUIRE(std::abs(bessel_j(nu, x) - want) <= 1e-10 * std::abs(want) + 1e-300);
        }
}

TEST_CASE("bessel_j against std::cyl_bessel_j") {
    for (int nu = 0; nu <= 120; nu += 4)
        for (double x = 0.05; x <= 300.0; x *= 1.37) {
            const double want = std::cyl_bessel_j(double(nu), x);
            REQUIRE(std::abs(bessel_j(nu, x) - want) <= 1e-10 * std::abs(want) + 1e-13);
        }
}

TEST_CASE("bessel recurrence and bound") {
    double worst = 0.0;
    for (int nu = 1; nu <= 60; ++nu)
        for (double x = 0.1; x <= 200.0; x += 0.37) {
            const double j = bessel_j(nu, x);
            const double r = bessel_j(nu - 1, x) + bessel_j(nu + 1, x) - 2.0 * nu / x * j;
            worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(j)));
            REQUIRE(std::abs(j) <= 1.0);
        }
    CHECK(worst <= 1e-9);
}

TEST_CASE("window functions") {
    const WindowFunction b = WindowFunction::bump();
    CHECK(b.support_begin() == 1.0);
    CHECK(b.support_end() == 2.0);
    CHECK(b(1.5) == doctest::Approx(1.0));
    CHECK(b(0.99) == 0.0);
    CHECK(b(2.01) == 0.0);
    const double theta = 1.0 / 154, M = 1e4, a = std::pow(M, -4 * theta);
    const WindowFunction v = WindowFunction::plateau(theta, M);
    CHECK(v.support_begin() >= a);
    CHECK(v.support_end() <= 4.0);
    for (double y = 2 * a; y <= 2.0; y += 0.01) REQUIRE(v(y) == doctest::Approx(1.0));
    CHECK(v(a * 0.99) == 0.0);
    CHECK(v(4.01) == 0.0);
    for (double y = 0; y <= 4.5; y += 0.013) REQUIRE((v(y) >= 0.0 && v(y) <= 1.0 + 1e-12));
}

TEST_CASE("integral matches a Simpson oracle") {
    const IntegralParams P = moderate();
    const WindowFunction V = WindowFunction::bump();
    const IntegralResult r = integral_I(P, V);
    const ComplexValue s1 = simpson(P, V, 20000), s2 = simpson(P, V, 40000);
    CHECK(std::abs(s1 - s2) < 1e-12);
    CHECK(std::abs(r.value - s2) < 1e-11);
    CHECK(std::abs(r.value) > 1e-7);
}

TEST_CASE("integral near the origin at high order is tiny") {
    IntegralParams P;
    P.N = 1;
    P.n = 1;
    P.l = 2;
    P.c = 1000;
    P.p = 11;
    P.M = 10000;
    P.k = 43;
    CHECK(std::abs(integral_I(P, WindowFunction::bump()).value) <= 1e-20);
}

TEST_CASE("empty effective support gives zero") {
    const WindowFunction V = WindowFunction::bump().clipped(3.0, 5.0);
    const IntegralResult r = integral_I(moderate(), V);
    CHECK(r.value == ComplexValue(0.0, 0.0));
}

TEST_CASE("tightening the tolerance moves the value by at most the looser tolerance") {
    const IntegralParams P = moderate();
    for (const WindowFunction& V : {WindowFunction::bump(), WindowFunction::plateau(1.0 / 154, 1e4)}) {
        const ComplexValue loose = integral_I(P, V, 1e-7).value;
        const ComplexValue tight = integral_I(P, V, 1e-12).value;
        REQUIRE(std::abs(loose - tight) <= 1e-7);
    }
}

TEST_CASE("integral parameter validation") {
    IntegralParams P = moderate();
    P.k = 13;
    CHECK_THROWS_AS(integral_I(P, WindowFunction::bump()), Error);
    P = moderate();
    P.c = 0;
    CHECK_THROWS_AS(integral_I(P, WindowFunction::bump()), Error);
}

TEST_CASE("transition cutoff") {
    const ToyScale toy;
    CutoffInputs in{toy.N(), toy.L(), toy.P(), toy.M};
    const double base = transition_cutoff(in);
    CHECK(base > 0.0);
    CHECK(std::isfinite(base));
    CutoffInputs bigger_p = in;
    bigger_p.P *= 1.5;
    CHECK(transition_cutoff(bigger_p) < base);
    CutoffInputs double_l = in;
    double_l.L *= 2;
    CHECK(transition_cutoff(double_l) == doctest::Approx(2 * base).epsilon(1e-14));
    in.theta = 1.0 / 154;
    const double ratio = transition_cutoff(in, CutoffMode::VoronoiUpper) / transition_cutoff(in, CutoffMode::VoronoiLower);
    CHECK(ratio == doctest::Approx(std::pow(toy.M, 4 * in.theta + 2 * in.eps)).epsilon(1e-12));
    CHECK(toy.cutoff() == doctest::Approx(base));
}

TEST_CASE("decay at toy scale") {
    const ToyScale toy;
    const auto pts = decay_points(toy, {0.25, 4.0});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].trivial_ratio <= 100.0);
    CHECK(std::isfinite(pts[0].magnitude));
    CHECK_FALSE(pts[0].negligible_required);
    CHECK(pts[1].negligible_required);
    CHECK(pts[1].negligible);
    CHECK(pts[1].magnitude <= 1e-15);
}

TEST_CASE("raising the weight does not increase the tail") {
    ToyScale toy;
    double prev = INFINITY;
    for (int k = 11; k <= 43; k += 4) {
        toy.k = k;
        const double mag = decay_points(toy, {4.0})[0].magnitude;
        REQUIRE(mag <= prev);
        prev = mag;
    }
}

}
