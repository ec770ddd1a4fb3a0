#include "deltasum/num_core.hpp"

#include "deltasum/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace deltasum {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotInvertible: return "NotInvertible";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NotPrime: return "NotPrime";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::ModulusMismatch: return "ModulusMismatch";
        case ErrorKind::PrincipalCharacter: return "PrincipalCharacter";
        case ErrorKind::SharedFactor: return "SharedFactor";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::ParameterInconsistency: return "ParameterInconsistency";
        case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::Unbounded: return "Unbounded";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::InfeasiblePoint: return "InfeasiblePoint";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

i64 gcd(i64 a, i64 b) noexcept {
    u64 x = a < 0 ? u64(0) - u64(a) : u64(a);
    u64 y = b < 0 ? u64(0) - u64(b) : u64(b);
    while (y != 0) {
        u64 t = x % y;
        x = y;
        y = t;
    }
    return i64(x);
}

i64 lcm_checked(i64 a, i64 b) {
    if (a <= 0 || b <= 0) throw Error(ErrorKind::OutOfRange, "lcm of non-positive values");
    i128 l = i128(a / gcd(a, b)) * b;
    if (l > kMaxProduct) throw Error(ErrorKind::OutOfRange, "denominator exceeds 2^62");
    return i64(l);
}

i64 mod(i64 a, i64 m) noexcept {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 mul_mod(i64 a, i64 b, i64 m) noexcept {
    if (m <= kMaxModulus) return (mod(a, m) * mod(b, m)) % m;
    return i64((i128(mod(a, m)) * mod(b, m)) % m);
}

i64 pow_mod(i64 base, u64 exp, i64 m) noexcept {
    if (m == 1) return 0;
    i64 result = 1;
    i64 b = mod(base, m);
    while (exp != 0) {
        if (exp & 1u) result = mul_mod(result, b, m);
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    return result;
}

i64 mod_inv(i64 a, i64 m) {
    if (m < 1 || m > kMaxProduct) throw Error(ErrorKind::OutOfRange, "modulus " + std::to_string(m));
    if (m == 1) return 0;
    i64 old_r = mod(a, m), r = m;
    i64 old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        i64 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) {
        throw Error(ErrorKind::NotInvertible,
                    std::to_string(a) + " mod " + std::to_string(m));
    }
    return mod(old_s, m);
}

i64 Factorization::recompose() const noexcept {
    i64 out = 1;
    for (auto [p, e] : factors)
        for (int i = 0; i < e; ++i) out *= p;
    return out;
}

Factorization factorize(i64 n) {
    if (n < 1 || n > kMaxFactorize)
        throw Error(ErrorKind::OutOfRange, "factorize supports 1 <= n <= 2^40, got " + std::to_string(n));
    Factorization f;
    f.n = n;
    i64 m = n;
    auto strip = [&](i64 p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e > 0) f.factors.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    // 6k +- 1 wheel
    for (i64 p = 5; p * p <= m; p += 6) {
        strip(p);
        strip(p + 2);
    }
    if (m > 1) f.factors.emplace_back(m, 1);
    return f;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0 || n % 3 == 0) return false;
    for (i64 p = 5; p * p <= n; p += 6)
        if (n % p == 0 || n % (p + 2) == 0) return false;
    return true;
}

ArithmeticValues arithmetic_functions(i64 n) {
    const Factorization f = factorize(n);
    ArithmeticValues v{1, 1, 1};
    for (auto [p, e] : f.factors) {
        i64 pk = 1;
        for (int i = 1; i < e; ++i) pk *= p;
        v.phi *= pk * (p - 1);
        v.mu = e > 1 ? 0 : -v.mu;
        v.divisors *= e + 1;
    }
    return v;
}

i64 primitive_root(i64 q) {
    if (q < 3 || !is_prime(q)) throw Error(ErrorKind::NotPrime, std::to_string(q));
    const Factorization f = factorize(q - 1);
    for (i64 g = 2; g < q; ++g) {
        bool ok = true;
        for (auto [p, e] : f.factors) {
            if (pow_mod(g, u64((q - 1) / p), q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw Error(ErrorKind::NotPrime, std::to_string(q));  // unreachable for primes
}

std::vector<i64> primes_between(i64 lo, i64 hi) {
    std::vector<i64> out;
    for (i64 p = std::max<i64>(lo + 1, 2); p < hi; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

i64 p_star(i64 P) {
    if (P < 1) throw Error(ErrorKind::OutOfRange, "P must be positive");
    i64 total = 0;
    for (i64 p : primes_between(P, 2 * P)) total += p - 1;
    return total;
}

RationalAngle::RationalAngle(i64 numerator, i64 denominator) {
    if (denominator < 1 || denominator > kMaxProduct)
        throw Error(ErrorKind::OutOfRange, "angle denominator " + std::to_string(denominator));
    i64 r = mod(numerator, denominator);
    i64 g = gcd(r, denominator);
    num_ = r / g;
    den_ = denominator / g;
}

RationalAngle RationalAngle::operator-() const {
    return RationalAngle(num_ == 0 ? 0 : den_ - num_, den_);
}

RationalAngle RationalAngle::scaled(i64 n) const {
    return RationalAngle(i64((i128(mod(n, den_)) * num_) % den_), den_);
}

RationalAngle angle_add(const RationalAngle& a, const RationalAngle& b) {
    const i64 den = lcm_checked(a.denominator(), b.denominator());
    const i128 na = i128(a.numerator()) * (den / a.denominator());
    const i128 nb = i128(b.numerator()) * (den / b.denominator());
    return RationalAngle(i64((na + nb) % den), den);
}

std::complex<double> unit_root(i64 numerator, i64 denominator) noexcept {
    i64 r = mod(numerator, denominator);
    // Fold into [-den/2, den/2] before converting so the angle is small.
    if (2 * i128(r) > denominator) r -= denominator;
    const long double t = 2.0L * std::numbers::pi_v<long double> *
                          (static_cast<long double>(r) / static_cast<long double>(denominator));
    return {static_cast<double>(std::cos(t)), static_cast<double>(std::sin(t))};
}

std::complex<double> unit_root(const RationalAngle& x) noexcept {
    return unit_root(x.numerator(), x.denominator());
}

}  // namespace deltasum
