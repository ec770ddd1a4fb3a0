#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace deltasum {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

inline constexpr i64 kMaxModulus = i64{1} << 31;    // moduli of sums
inline constexpr i64 kMaxProduct = i64{1} << 62;    // products of two moduli
inline constexpr i64 kMaxFactorize = i64{1} << 40;

i64 gcd(i64 a, i64 b) noexcept;
i64 lcm_checked(i64 a, i64 b);   // OutOfRange above kMaxProduct

// Least nonnegative residue of a modulo m (m >= 1).
i64 mod(i64 a, i64 m) noexcept;
i64 mul_mod(i64 a, i64 b, i64 m) noexcept;
i64 pow_mod(i64 base, u64 exp, i64 m) noexcept;

// Inverse of a modulo m in [0, m). mod_inv(a, 1) == 0.
// Throws NotInvertible when gcd(a, m) > 1.
i64 mod_inv(i64 a, i64 m);

struct Factorization {
    i64 n = 1;
    std::vector<std::pair<i64, int>> factors;  // increasing primes, exponents >= 1

    i64 recompose() const noexcept;
    bool operator==(const Factorization&) const = default;
};

// Deterministic trial division, n <= 2^40.
Factorization factorize(i64 n);

bool is_prime(i64 n);

struct ArithmeticValues {
    i64 phi;
    int mu;
    i64 divisors;
    bool operator==(const ArithmeticValues&) const = default;
};

ArithmeticValues arithmetic_functions(i64 n);
inline i64 euler_phi(i64 n) { return arithmetic_functions(n).phi; }
inline int moebius(i64 n) { return arithmetic_functions(n).mu; }
inline i64 divisor_count(i64 n) { return arithmetic_functions(n).divisors; }

// Smallest primitive root modulo an odd prime q.
i64 primitive_root(i64 q);

// Primes p with lo < p < hi, ascending.
std::vector<i64> primes_between(i64 lo, i64 hi);

// Sum over primes P < p < 2P of (p - 1): the normalising count of the
// odd-character average.
i64 p_star(i64 P);

/// Exact element of Q/Z, always held as numerator/denominator with
/// 0 <= numerator < denominator and gcd(numerator, denominator) == 1.
class RationalAngle {
public:
    RationalAngle() = default;
    RationalAngle(i64 numerator, i64 denominator);

    i64 numerator() const noexcept { return num_; }
    i64 denominator() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_ == 0; }

    RationalAngle operator-() const;
    // n * angle, exact.
    RationalAngle scaled(i64 n) const;

    bool operator==(const RationalAngle&) const = default;

private:
    i64 num_ = 0;
    i64 den_ = 1;
};

// Exact sum mod 1; OutOfRange when the reduced denominator would exceed 2^62.
RationalAngle angle_add(const RationalAngle& a, const RationalAngle& b);
inline RationalAngle operator+(const RationalAngle& a, const RationalAngle& b) { return angle_add(a, b); }
inline RationalAngle operator-(const RationalAngle& a, const RationalAngle& b) { return angle_add(a, -b); }

// e(x) = exp(2 pi i x).
std::complex<double> unit_root(const RationalAngle& x) noexcept;
std::complex<double> unit_root(i64 numerator, i64 denominator) noexcept;

}  // namespace deltasum
