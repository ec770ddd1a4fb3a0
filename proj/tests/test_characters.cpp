#include "deltasum/characters.hpp"
#include "deltasum/error.hpp"
#include "deltasum/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace deltasum;

namespace {

std::vector<i64> odd_primes_upto(i64 n) {
    std::vector<i64> out;
    for (i64 p : primes_between(2, n + 1))
        if (p > 2) out.push_back(p);
    return out;
}

ComplexValue e(double x) { return std::polar(1.0, 2.0 * std::numbers::pi * x); }

}  // namespace

TEST_SUITE("characters") {

TEST_CASE("enumerate_characters examples") {
    CHECK(enumerate_characters(3).size() == 2);
    const auto five = enumerate_characters(5);
    CHECK(five.size() == 4);
    CHECK(std::count_if(five.begin(), five.end(), [](const auto& c) { return c.parity() == -1; }) == 2);
    CHECK_THROWS_AS(enumerate_characters(4), Error);
    CHECK_THROWS_AS(enumerate_characters(2), Error);
    for (std::size_t i = 0; i < five.size(); ++i) CHECK(five[i].index() == i64(i));
}

TEST_CASE("eval examples") {
    const DirichletCharacter principal(5, 0);
    CHECK(principal(3) == ComplexValue(1.0, 0.0));
    for (const auto& chi : enumerate_characters(7)) CHECK(chi(7) == ComplexValue(0.0, 0.0));
    // 3 is not a square mod 7: the squares are 1, 2, 4.
    CHECK(std::abs(DirichletCharacter::legendre(7)(3) + 1.0) < 1e-15);
    CHECK(std::abs(DirichletCharacter::legendre(7)(2) - 1.0) < 1e-15);
}

TEST_CASE("parity examples") {
    CHECK(DirichletCharacter(11, 0).parity() == 1);
    CHECK(DirichletCharacter::legendre(3).parity() == -1);
    CHECK(DirichletCharacter(13, 6).parity() == 1);
}

TEST_CASE("character value at g^k is e(a k/(q-1))") {
    for (i64 q : {3, 7, 31, 101}) {
        const i64 g = primitive_root(q);
        for (i64 a = 0; a < q - 1; a += 3) {
            const DirichletCharacter chi(q, a);
            CHECK(chi.generator() == g);
            i64 x = 1;
            for (i64 k = 0; k < q - 1; ++k) {
                REQUIRE(std::abs(chi(x) - e(double(a * k % (q - 1)) / double(q - 1))) < 1e-12);
                x = x * g % q;
            }
        }
    }
}

TEST_CASE("complete multiplicativity") {
    GridRng rng(3);
    const auto primes = odd_primes_upto(400);
    for (int t = 0; t < 10000; ++t) {
        const i64 q = primes[std::size_t(rng.uniform(0, i64(primes.size()) - 1))];
        const DirichletCharacter chi(q, rng.uniform(0, q - 2));
        const i64 m = rng.uniform(-5000, 5000), n = rng.uniform(-5000, 5000);
        REQUIRE(std::abs(chi(m * n) - chi(m) * chi(n)) <= 1e-12);
    }
}

TEST_CASE("orthogonality over the character group") {
    for (i64 p : odd_primes_upto(101)) {
        const auto chars = enumerate_characters(p);
        for (i64 x = 0; x < p; ++x) {
            ComplexValue s{};
            for (const auto& psi : chars) s += psi(x);
            const double want = x % p == 1 ? double(p - 1) : 0.0;
            REQUIRE(std::abs(s - want) <= 1e-9 * double(p));
        }
    }
}

TEST_CASE("exactly half the characters are odd") {
    for (i64 p : odd_primes_upto(101)) {
        const auto chars = enumerate_characters(p);
        const auto odd = std::count_if(chars.begin(), chars.end(), [](const auto& c) { return c.parity() == -1; });
        REQUIRE(odd == (p - 1) / 2);
        for (const auto& c : chars) REQUIRE(std::abs(c(-1) - double(c.parity())) < 1e-12);
    }
}

TEST_CASE("gauss_sum examples") {
    CHECK(std::abs(gauss_sum(DirichletCharacter::legendre(3)) - ComplexValue(0.0, std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(gauss_sum(DirichletCharacter::legendre(3)) - (e(1.0 / 3) - e(2.0 / 3))) < 1e-12);
    CHECK(std::abs(gauss_sum(DirichletCharacter::legendre(5)) - std::sqrt(5.0)) < 1e-12);
    for (i64 q : {3, 5, 13, 101}) CHECK(std::abs(gauss_sum(DirichletCharacter(q, 0)) + 1.0) < 1e-9);
}

TEST_CASE("gauss sums have modulus sqrt(q) and g g-bar = chi(-1) q") {
    for (i64 q : odd_primes_upto(499)) {
        for (const auto& chi : enumerate_characters(q)) {
            if (chi.is_principal()) continue;
            const ComplexValue g = gauss_sum(chi), gb = gauss_sum(chi.conj());
            REQUIRE(std::abs(std::norm(g) - double(q)) <= 1e-6 * double(q));
            REQUIRE(std::abs(g * gb - double(chi.parity() * q)) <= 1e-6 * double(q));
        }
    }
}

TEST_CASE("exact angle matches the value") {
    const DirichletCharacter chi(31, 7);
    for (i64 n = 1; n < 31; ++n) CHECK(std::abs(unit_root(chi.angle(n)) - chi(n)) < 1e-13);
    CHECK_THROWS_AS(DirichletCharacter(7, 6), Error);
    CHECK_THROWS_AS(DirichletCharacter(9, 1), Error);
}

}
