#include "deltasum/error.hpp"
#include "deltasum/expsums.hpp"

#include "deltasum/compensated.hpp"

#include <string>

namespace deltasum {

namespace {

void check_voronoi_shape(const VoronoiParams& P) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::ParameterInconsistency, why); };
    if (P.m < 1 || P.m_prime < 1 || P.c < 1 || P.d < 1 || P.r < 1 || P.M < 1) fail("parameters must be positive");
    if (P.c % P.d != 0) fail("d must divide c");
    if ((P.m * P.c) % P.m_prime != 0) fail("m' must divide m c");
    if (!is_prime(P.l)) fail("l must be prime");
    if (!is_prime(P.M)) fail("M must be prime");
    if (gcd(P.M, P.c / P.d) != 1) fail("M must be coprime to c/d");
}

}  // namespace

VoronoiStructure voronoi_structure(const VoronoiParams& P) {
    check_voronoi_shape(P);
    VoronoiStructure s{};
    const i64 cc = P.c / P.d;
    s.c1 = gcd(P.m_prime, cc);
    s.c2 = cc / s.c1;
    s.m2 = P.m_prime / s.c1;
    if ((P.m * P.d) % s.m2 != 0)
        throw Error(ErrorKind::ParameterInconsistency, "m'' must divide m d");
    if (s.c1 % P.l == 0) throw Error(ErrorKind::ParameterInconsistency, "l must not divide c1");
    s.q = P.m * P.d / s.m2;
    // q2 collects the primes of q that divide c2.
    s.q1 = s.q;
    s.q2 = 1;
    for (i64 g = gcd(s.q1, s.c2); g > 1; g = gcd(s.q1, s.c2)) {
        s.q1 /= g;
        s.q2 *= g;
    }
    return s;
}

ExpSumValue voronoi_char_sum_raw(const VoronoiParams& P) {
    check_voronoi_shape(P);
    const i64 R = P.m * P.c / P.m_prime;
    if (R > kSummationBudget) throw Error(ErrorKind::BudgetExceeded, "beta modulus above summation budget");
    const i64 cc = P.c / P.d;
    const i64 shift = mul_mod(P.r * P.l, mod_inv(P.M, cc), cc);
    const RootTable roots(R);
    CompensatedSum acc;
    i64 terms = 0;
    for (i64 beta = 1; beta <= R; ++beta) {
        if (gcd(beta, R) != 1) continue;
        if (mod(shift + mul_mod(beta, P.m_prime, cc), cc) != 0) continue;
        acc.add(roots(mul_mod(mod_inv(beta, R), P.n, R)));
        ++terms;
    }
    return {acc.value(), terms, double(terms) * kUnitTermError};
}

ExpSumValue voronoi_char_sum_closed(const VoronoiParams& P) {
    const VoronoiStructure s = voronoi_structure(P);
    const ExpSumValue zero{{0.0, 0.0}, s.q, 0.0};
    if (P.r % s.c1 != 0 || P.n % s.q2 != 0) return zero;
    const i64 r1 = P.r / s.c1;
    // No unit beta satisfies the congruence when r'l shares a factor with c2.
    if (gcd(r1 * P.l, s.c2) != 1) return zero;
    const i64 inv = mod_inv(mul_mod(mul_mod(r1, P.l, s.c2), s.q1, s.c2), s.c2);
    i64 phase = mul_mod(inv, s.m2, s.c2);
    phase = mul_mod(phase, P.M, s.c2);
    phase = mul_mod(phase, P.n / s.q2, s.c2);
    const double amplitude = double(s.q2 * ramanujan_sum(s.q1, P.n));
    return {amplitude * unit_root(-phase, s.c2), s.q, double(s.q) * kUnitTermError};
}

ExpSumValue voronoi_char_sum_stated(const VoronoiParams& P) {
    const VoronoiStructure s = voronoi_structure(P);
    const ExpSumValue zero{{0.0, 0.0}, s.q, 0.0};
    if (P.r % s.c1 != 0 || P.n % s.q2 != 0) return zero;
    const i64 r1 = P.r / s.c1;
    const i64 big = s.q * s.c2;
    if (gcd(r1 * P.l, big) != 1)
        throw Error(ErrorKind::ParameterInconsistency, "r'l must be invertible modulo q c2");
    i64 phase = mul_mod(mod_inv(mul_mod(r1, P.l, big), big), s.m2, big);
    phase = mul_mod(phase, P.M, big);
    phase = mul_mod(phase, P.n, big);
    const double amplitude = double(s.q2 * ramanujan_sum(s.q1, P.n));
    return {amplitude * unit_root(-phase, big), s.q, double(s.q) * kUnitTermError};
}

}  // namespace deltasum
