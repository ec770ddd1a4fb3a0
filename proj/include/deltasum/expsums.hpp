#pragma once

#include "deltasum/characters.hpp"
#include "deltasum/num_core.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace deltasum {

// Largest modulus any direct summation will accept.
inline constexpr i64 kSummationBudget = 10'000'000;

/// Result of a finite exponential sum.
///
/// `terms` counts the unit-modulus summands of the fully expanded sum, so
/// |value| <= terms + est_error always holds. `est_error` is an upper
/// estimate of accumulated rounding, at most a few ulps per summand.
struct ExpSumValue {
    ComplexValue value{};
    i64 terms = 0;
    double est_error = 0.0;
};

// e(k/c) for k mod c, tabulated when c is small enough to be worth it.
class RootTable {
public:
    explicit RootTable(i64 c);
    // Process-wide copy for small moduli, built once.
    static std::shared_ptr<const RootTable> shared(i64 c);
    i64 modulus() const noexcept { return c_; }
    ComplexValue operator()(i64 k) const noexcept;

private:
    i64 c_;
    std::vector<ComplexValue> table_;
};

// |lhs - rhs| <= 1e-6 sqrt(T) + 1e-9 (|lhs| + |rhs|), T = total summands.
double identity_tolerance(i64 total_terms, double lhs_abs, double rhs_abs) noexcept;
bool identity_holds(const ExpSumValue& lhs, const ExpSumValue& rhs) noexcept;
// |lhs - rhs| / tolerance; <= 1 means the identity holds.
double identity_deviation(const ExpSumValue& lhs, const ExpSumValue& rhs) noexcept;

// S(m, n; c) = sum over units x mod c of e((m x + n xbar)/c).
ExpSumValue kloosterman(i64 m, i64 n, i64 c);

// sum over units x mod c of psi(x) e((m x + n xbar)/c), psi modulo p | c.
ExpSumValue twisted_kloosterman(const DirichletCharacter& psi, i64 m, i64 n, i64 c);

// Closed form mu(q/g) phi(q) / phi(q/g), g = gcd(n, q).
i64 ramanujan_sum(i64 q, i64 n);

// D(u; M) = sum_{b mod M, (b(b-1), M) = 1} conj(chi)(b-1) e((bbar - 1) u / M)
// for non-principal chi modulo the prime M.
ExpSumValue d_sum(i64 u, const DirichletCharacter& chi);

struct PsiAverageParams {
    i64 r = 1;
    i64 m = 1;
    i64 c = 1;
    i64 p = 3;
    i64 M = 5;
};

// sum_{psi mod p} (1 - psi(-1)) S_psi(r, m; c p M) by direct double summation.
ExpSumValue psi_average_raw(const PsiAverageParams& P);
// (p-1) S(pbar r, pbar m; cM) [e(w) - e(-w)], w = (cM)^{-1} (r + m) / p.
ExpSumValue psi_average_closed(const PsiAverageParams& P);

// Correlation sum C3 at ratio v: sum_a D(a) conj(D(a vbar)), evaluated from
// the D-values themselves.
ExpSumValue c3_raw(i64 v, const DirichletCharacter& chi);
// The same sum after the a-orthogonality step:
// M * sum over admissible (b, b') with b'bar = 1 + (bbar - 1) v of conj(chi)(b-1) chi(b'-1).
ExpSumValue c3_pair_sum(i64 v, const DirichletCharacter& chi);
// M * sum_{b mod M, (b(b-1), M) = 1} conj(chi)(1 + b (vbar - 1)).
ExpSumValue c3_closed(i64 v, const DirichletCharacter& chi);

// Parameters of the correlation sum C4 of two Kloosterman sums with moduli
// r'l and r'l' against e(a n / r'l l').
struct C4Params {
    i64 c2 = 1;
    i64 q2_content = 1;  // product of the primes dividing q2
    i64 p = 17;
    i64 p_prime = 19;
    i64 q1 = 1;
    i64 m2 = 1;  // m''
    i64 M = 37;
    i64 h = 1;
    i64 n = 1;
    i64 r1 = 1;  // r'
    i64 l = 5;
    i64 l_prime = 7;
};

// Arguments (A, K) of S(A, K a; r'l) for one of the two factors.
struct C4Factor {
    i64 modulus;
    i64 shift;       // c2 - q2~ pbar
    i64 multiplier;  // q1bar q2~bar m'' M h
};
std::pair<C4Factor, C4Factor> c4_factors(const C4Params& P);

ExpSumValue c4_correlation(const C4Params& P);

// Parameters of the beta-sum left after Voronoi summation. `c` is the full
// modulus with d | c; the congruence is taken modulo c/d.
struct VoronoiParams {
    i64 n = 1;
    i64 m = 1;
    i64 m_prime = 1;
    i64 c = 1;
    i64 d = 1;
    i64 r = 1;
    i64 l = 2;
    i64 M = 7;
};

// Decomposition c/d = c1 c2, m' = c1 m'', q = m d / m'' = q1 q2 used by the
// closed form. Throws ParameterInconsistency when the structure fails.
struct VoronoiStructure {
    i64 c1, c2, m2, q, q1, q2;
};
VoronoiStructure voronoi_structure(const VoronoiParams& P);

// sum* over beta mod mc/m' with r l Mbar + beta m' = 0 mod c/d of e(betabar n / (mc/m')).
ExpSumValue voronoi_char_sum_raw(const VoronoiParams& P);
// Exact evaluation: 0 unless c1 | r and q2 | n, else
// q2 c_{q1}(n) e(-(r' l q1)^{-1} m'' M (n/q2) / c2) with the inverse mod c2.
ExpSumValue voronoi_char_sum_closed(const VoronoiParams& P);
// The same evaluation with the phase written as e(-(r' l)^{-1} m'' M n / (q c2)),
// inverse modulo q c2. Agrees with the exact form in the vanishing strata
// and in modulus, but not in phase in general.
ExpSumValue voronoi_char_sum_stated(const VoronoiParams& P);

struct TwistedSplit {
    ExpSumValue lhs;                  // S_psi(n p^2 M, r l; c p M)
    ExpSumValue rhs1;                 // -S_psi(n p^2, r l Mbar; c p), or 0 when M | c
    std::optional<ExpSumValue> rhs2;  // -psi(r l) conj(psi)(c M) g_conj(psi) S(n, r l Mbar; c)
};

// rhs2 is present only when p does not divide c and r l.
TwistedSplit twisted_split_check(i64 n, i64 M, i64 r, i64 l, i64 c, const DirichletCharacter& psi);

// sum_{a mod c} S(pbar Mbar a, pbar Mbar n l; c) e(-(pM)bar (a + n l) / c); equals c.
ExpSumValue c1_raw(i64 c, i64 p, i64 M, i64 n, i64 l);

// sum_{a mod M} chi(a) S((pc)bar a, (pc)bar n l; M) e(-(pc)bar (a + n l) / M).
ExpSumValue c2_raw(const DirichletCharacter& chi, i64 p, i64 c, i64 n, i64 l);
// chi(pc) g_chi D((pc)bar n l; M).
ExpSumValue c2_closed(const DirichletCharacter& chi, i64 p, i64 c, i64 n, i64 l);
// Inner a-sum for a fixed b: sum_{a mod M} chi(a) e((b-1)(pc)bar a / M).
ExpSumValue c2_inner_sum(const DirichletCharacter& chi, i64 p, i64 c, i64 b);

}  // namespace deltasum
