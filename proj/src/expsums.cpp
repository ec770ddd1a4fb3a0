#include "deltasum/expsums.hpp"

#include "deltasum/compensated.hpp"
#include "deltasum/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace deltasum {

namespace {

constexpr i64 kMaxRootTable = i64{1} << 22;
constexpr i64 kMaxSharedRootTable = i64{1} << 16;

// Inverse of a modulo m, or -1 when none exists. m >= 1.
i64 try_inverse(i64 a, i64 m) noexcept {
    if (m == 1) return 0;
    i64 old_r = mod(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        const i64 q = old_r / r;
        i64 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    return old_r == 1 ? mod(old_s, m) : -1;
}

void check_budget(i64 c, const char* what) {
    if (c < 1) throw Error(ErrorKind::OutOfRange, std::string(what) + ": modulus must be positive");
    if (c > kSummationBudget)
        throw Error(ErrorKind::BudgetExceeded,
                    std::string(what) + ": modulus " + std::to_string(c) + " above summation budget");
}

void require_nonprincipal(const DirichletCharacter& chi, const char* what) {
    if (chi.is_principal()) throw Error(ErrorKind::PrincipalCharacter, what);
}

// Kloosterman-type sum with an optional multiplicative weight on x.
template <class Weight>
ExpSumValue weighted_kloosterman(i64 m, i64 n, i64 c, Weight&& weight, double per_term_error) {
    const auto table = RootTable::shared(c);
    const RootTable& roots = *table;
    const i64 mr = mod(m, c), nr = mod(n, c);
    CompensatedSum acc;
    i64 terms = 0;
    for (i64 x = 0; x < c; ++x) {
        const i64 xbar = try_inverse(x, c);
        if (xbar < 0) continue;
        // c <= 10^7 keeps both products and their sum inside 64 bits.
        const i64 k = (mr * x + nr * xbar) % c;
        acc.add(weight(x) * roots(k));
        ++terms;
    }
    return {acc.value(), terms, double(terms) * per_term_error};
}

}  // namespace

RootTable::RootTable(i64 c) : c_(c) {
    if (c < 1) throw Error(ErrorKind::OutOfRange, "root table modulus");
    if (c <= kMaxRootTable) {
        table_.resize(std::size_t(c));
        for (i64 k = 0; k < c; ++k) table_[std::size_t(k)] = unit_root(k, c);
    }
}

std::shared_ptr<const RootTable> RootTable::shared(i64 c) {
    if (c > kMaxSharedRootTable) return std::make_shared<const RootTable>(c);
    static std::mutex mu;
    static std::map<i64, std::shared_ptr<const RootTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[c];
    if (!slot) slot = std::make_shared<const RootTable>(c);
    return slot;
}

ComplexValue RootTable::operator()(i64 k) const noexcept {
    const i64 r = mod(k, c_);
    return table_.empty() ? unit_root(r, c_) : table_[std::size_t(r)];
}

double identity_tolerance(i64 total_terms, double lhs_abs, double rhs_abs) noexcept {
    return 1e-6 * std::sqrt(double(std::max<i64>(total_terms, 1))) + 1e-9 * (lhs_abs + rhs_abs);
}

double identity_deviation(const ExpSumValue& lhs, const ExpSumValue& rhs) noexcept {
    const i64 T = std::max(lhs.terms, rhs.terms);
    return std::abs(lhs.value - rhs.value) / identity_tolerance(T, std::abs(lhs.value), std::abs(rhs.value));
}

bool identity_holds(const ExpSumValue& lhs, const ExpSumValue& rhs) noexcept {
    return identity_deviation(lhs, rhs) <= 1.0;
}

ExpSumValue kloosterman(i64 m, i64 n, i64 c) {
    check_budget(c, "kloosterman");
    return weighted_kloosterman(m, n, c, [](i64) { return ComplexValue(1.0, 0.0); }, kUnitTermError);
}

ExpSumValue twisted_kloosterman(const DirichletCharacter& psi, i64 m, i64 n, i64 c) {
    check_budget(c, "twisted_kloosterman");
    if (c % psi.modulus() != 0)
        throw Error(ErrorKind::ModulusMismatch,
                    "character modulus " + std::to_string(psi.modulus()) + " does not divide " + std::to_string(c));
    return weighted_kloosterman(m, n, c, [&](i64 x) { return psi(x); }, 2 * kUnitTermError);
}

i64 ramanujan_sum(i64 q, i64 n) {
    if (q < 1) throw Error(ErrorKind::OutOfRange, "ramanujan_sum modulus must be positive");
    const i64 g = gcd(n, q);  // gcd(0, q) = q
    const i64 qg = q / g;
    return moebius(qg) * (euler_phi(q) / euler_phi(qg));
}

ExpSumValue d_sum(i64 u, const DirichletCharacter& chi) {
    require_nonprincipal(chi, "d_sum needs a non-principal character");
    const i64 M = chi.modulus();
    const DirichletCharacter chibar = chi.conj();
    const auto roots_ptr = RootTable::shared(M);
    const RootTable& roots = *roots_ptr;
    const auto dlog = DlogTable::get(M);
    const i64 ur = mod(u, M);
    CompensatedSum acc;
    i64 terms = 0;
    for (i64 b = 2; b < M; ++b) {
        const i64 bbar = dlog->power[std::size_t((M - 1 - dlog->log[std::size_t(b)]) % (M - 1))];
        const i64 k = mul_mod(bbar - 1, ur, M);
        acc.add(chibar(b - 1) * roots(k));
        ++terms;
    }
    return {acc.value(), terms, double(terms) * 2 * kUnitTermError};
}

ExpSumValue psi_average_raw(const PsiAverageParams& P) {
    if (P.c < 1 || P.r < 0 || P.m < 0) throw Error(ErrorKind::OutOfRange, "psi_average parameters");
    const i128 modulus = i128(P.c) * P.p * P.M;
    if (modulus > kSummationBudget) throw Error(ErrorKind::BudgetExceeded, "c p M above summation budget");
    const i64 cpM = i64(modulus);
    CompensatedSum acc;
    double err = 0.0;
    i64 terms = 0;
    for (const auto& psi : enumerate_characters(P.p)) {
        const ExpSumValue s = twisted_kloosterman(psi, P.r, P.m, cpM);
        const double weight = 1.0 - double(psi.parity());
        acc.add(weight * s.value);
        err += weight * s.est_error;
        terms += 2 * s.terms;
    }
    return {acc.value(), terms, err};
}

ExpSumValue psi_average_closed(const PsiAverageParams& P) {
    if (P.c < 1) throw Error(ErrorKind::OutOfRange, "psi_average parameters");
    if (!is_prime(P.p) || P.p < 3) throw Error(ErrorKind::NotPrime, "p must be an odd prime");
    const i64 cM = P.c * P.M;
    if (gcd(P.p, cM) != 1) throw Error(ErrorKind::SharedFactor, "gcd(p, cM) > 1");
    check_budget(cM, "psi_average_closed");
    const i64 pbar = mod_inv(P.p, cM);
    const ExpSumValue s = kloosterman(mul_mod(pbar, P.r, cM), mul_mod(pbar, P.m, cM), cM);
    const RationalAngle w(mul_mod(mod_inv(cM, P.p), P.r + P.m, P.p), P.p);
    const ComplexValue bracket = unit_root(w) - unit_root(-w);
    const double scale = double(P.p - 1);
    return {scale * s.value * bracket, 2 * (P.p - 1) * s.terms, scale * 2 * (s.est_error + s.terms * kUnitTermError)};
}

ExpSumValue c3_raw(i64 v, const DirichletCharacter& chi) {
    require_nonprincipal(chi, "c3 needs a non-principal character");
    const i64 M = chi.modulus();
    if (mod(v, M) == 0) throw Error(ErrorKind::NotUnit, "v must be a unit mod M");
    std::vector<ComplexValue> D(static_cast<std::size_t>(M));
    double d_err = 0.0;
    for (i64 a = 0; a < M; ++a) {
        const ExpSumValue s = d_sum(a, chi);
        D[std::size_t(a)] = s.value;
        d_err = std::max(d_err, s.est_error);
    }
    const i64 vbar = mod_inv(v, M);
    CompensatedSum acc;
    for (i64 a = 0; a < M; ++a) acc.add(D[std::size_t(a)] * std::conj(D[std::size_t(mul_mod(a, vbar, M))]));
    const i64 terms = M * (M - 2) * (M - 2);
    return {acc.value(), terms, double(M) * 2 * (double(M - 2) * d_err) + double(terms) * kUnitTermError};
}

ExpSumValue c3_pair_sum(i64 v, const DirichletCharacter& chi) {
    require_nonprincipal(chi, "c3 needs a non-principal character");
    const i64 M = chi.modulus();
    if (mod(v, M) == 0) throw Error(ErrorKind::NotUnit, "v must be a unit mod M");
    const DirichletCharacter chibar = chi.conj();
    CompensatedSum acc;
    i64 terms = 0;
    for (i64 b = 2; b < M; ++b) {
        // b' is determined by b'bar = 1 + (bbar - 1) v; skip when no admissible b' exists.
        const i64 bp_bar = mod(1 + mul_mod(mod_inv(b, M) - 1, v, M), M);
        if (bp_bar == 0) continue;
        const i64 bp = mod_inv(bp_bar, M);
        if (bp == 1) continue;
        acc.add(chibar(b - 1) * chi(bp - 1));
        ++terms;
    }
    return {double(M) * acc.value(), M * terms, double(M * terms) * 2 * kUnitTermError};
}

ExpSumValue c3_closed(i64 v, const DirichletCharacter& chi) {
    require_nonprincipal(chi, "c3 needs a non-principal character");
    const i64 M = chi.modulus();
    if (mod(v, M) == 0) throw Error(ErrorKind::NotUnit, "v must be a unit mod M");
    const DirichletCharacter chibar = chi.conj();
    const i64 step = mod(mod_inv(v, M) - 1, M);
    CompensatedSum acc;
    for (i64 b = 2; b < M; ++b) acc.add(chibar(1 + mul_mod(b, step, M)));
    const i64 terms = M * (M - 2);
    return {double(M) * acc.value(), terms, double(terms) * kUnitTermError};
}

std::pair<C4Factor, C4Factor> c4_factors(const C4Params& P) {
    if (P.r1 < 1 || P.l < 2 || P.l_prime < 2)
        throw Error(ErrorKind::ParameterInconsistency, "c4 needs r' >= 1 and primes l, l'");
    auto factor = [&](i64 p, i64 l) {
        const i64 modulus = P.r1 * l;
        const i64 pbar = try_inverse(p, modulus);
        const i64 qbar = try_inverse(P.q1 * P.q2_content, modulus);
        if (pbar < 0 || qbar < 0)
            throw Error(ErrorKind::ParameterInconsistency,
                        "p and q1 q2~ must be coprime to r'l = " + std::to_string(modulus));
        const i64 shift = mod(P.c2 - mul_mod(P.q2_content, pbar, modulus), modulus);
        i64 mult = mul_mod(qbar, P.m2, modulus);
        mult = mul_mod(mult, P.M, modulus);
        mult = mul_mod(mult, P.h, modulus);
        return C4Factor{modulus, shift, mult};
    };
    return {factor(P.p, P.l), factor(P.p_prime, P.l_prime)};
}

ExpSumValue c4_correlation(const C4Params& P) {
    const auto [f1, f2] = c4_factors(P);
    const i128 big = i128(P.r1) * P.l * P.l_prime;
    if (big > kSummationBudget) throw Error(ErrorKind::BudgetExceeded, "r' l l' above summation budget");
    const i64 Q = i64(big);
    // S(shift, t; modulus) depends on a only through t = multiplier * a mod modulus.
    auto tabulate = [](const C4Factor& f) {
        std::vector<ExpSumValue> out(std::size_t(f.modulus));
        for (i64 t = 0; t < f.modulus; ++t) out[std::size_t(t)] = kloosterman(f.shift, t, f.modulus);
        return out;
    };
    const auto s1 = tabulate(f1);
    const auto s2 = tabulate(f2);
    const RootTable roots(Q);
    const i64 nr = mod(P.n, Q);
    CompensatedSum acc;
    double err = 0.0;
    for (i64 a = 0; a < Q; ++a) {
        const ExpSumValue& x = s1[std::size_t(mul_mod(f1.multiplier, a, f1.modulus))];
        const ExpSumValue& y = s2[std::size_t(mul_mod(f2.multiplier, a, f2.modulus))];
        acc.add(x.value * y.value * roots(mul_mod(a, nr, Q)));
        err += x.est_error * double(y.terms) + y.est_error * double(x.terms);
    }
    const i64 terms = Q * euler_phi(f1.modulus) * euler_phi(f2.modulus);
    return {acc.value(), terms, err + double(terms) * 2 * kUnitTermError};
}

TwistedSplit twisted_split_check(i64 n, i64 M, i64 r, i64 l, i64 c, const DirichletCharacter& psi) {
    const i64 p = psi.modulus();
    if (!is_prime(M) || M == p) throw Error(ErrorKind::ParameterInconsistency, "M must be a prime different from p");
    if (c < 1) throw Error(ErrorKind::ParameterInconsistency, "c must be positive");
    if (gcd(r * l, M) != 1) throw Error(ErrorKind::ParameterInconsistency, "gcd(r l, M) must be 1");
    const i128 big = i128(c) * p * M;
    if (big > kSummationBudget) throw Error(ErrorKind::BudgetExceeded, "c p M above summation budget");
    const i64 cpM = i64(big), cp = c * p;
    const i64 rl = r * l;

    TwistedSplit out;
    out.lhs = twisted_kloosterman(psi, n * p * p * M, rl, cpM);
    if (c % M == 0) {
        out.rhs1 = ExpSumValue{{0.0, 0.0}, out.lhs.terms, 0.0};
        return out;
    }
    const i64 Mbar = mod_inv(M, cp);
    ExpSumValue inner = twisted_kloosterman(psi, n * p * p, mul_mod(rl, Mbar, cp), cp);
    out.rhs1 = {-inner.value, inner.terms, inner.est_error};

    if (c % p != 0 && rl % p != 0) {
        const DirichletCharacter psibar = psi.conj();
        const ExpSumValue s = kloosterman(n, mul_mod(rl, mod_inv(M, c), c), c);
        const ComplexValue g = gauss_sum(psibar);
        const ComplexValue factor = psi(rl) * psibar(c * M) * g;
        const i64 terms = s.terms * (p - 1);
        out.rhs2 = ExpSumValue{-factor * s.value, terms,
                               std::abs(g) * s.est_error + double(terms) * 3 * kUnitTermError};
    }
    return out;
}

ExpSumValue c1_raw(i64 c, i64 p, i64 M, i64 n, i64 l) {
    check_budget(c, "c1");
    if (gcd(p * M, c) != 1) throw Error(ErrorKind::SharedFactor, "gcd(pM, c) > 1");
    if (c > 20'000) throw Error(ErrorKind::BudgetExceeded, "c1 is a double sum; c above 2*10^4");
    const i64 pMbar = mod_inv(mul_mod(p, M, c), c);
    const i64 nl = mul_mod(n, l, c);
    const RootTable roots(c);
    CompensatedSum acc;
    double err = 0.0;
    i64 terms = 0;
    for (i64 a = 0; a < c; ++a) {
        const ExpSumValue s = kloosterman(mul_mod(pMbar, a, c), mul_mod(pMbar, nl, c), c);
        acc.add(s.value * roots(-mul_mod(pMbar, a + nl, c)));
        err += s.est_error + double(s.terms) * kUnitTermError;
        terms += s.terms;
    }
    return {acc.value(), terms, err};
}

ExpSumValue c2_raw(const DirichletCharacter& chi, i64 p, i64 c, i64 n, i64 l) {
    const i64 M = chi.modulus();
    if (gcd(p * c, M) != 1) throw Error(ErrorKind::SharedFactor, "gcd(pc, M) > 1");
    const i64 pcbar = mod_inv(mul_mod(p, c, M), M);
    const i64 nl = mul_mod(n, l, M);
    const RootTable roots(M);
    CompensatedSum acc;
    double err = 0.0;
    i64 terms = 0;
    for (i64 a = 1; a < M; ++a) {
        const ExpSumValue s = kloosterman(mul_mod(pcbar, a, M), mul_mod(pcbar, nl, M), M);
        acc.add(chi(a) * s.value * roots(-mul_mod(pcbar, a + nl, M)));
        err += s.est_error + double(s.terms) * 2 * kUnitTermError;
        terms += s.terms;
    }
    return {acc.value(), terms, err};
}

ExpSumValue c2_closed(const DirichletCharacter& chi, i64 p, i64 c, i64 n, i64 l) {
    const i64 M = chi.modulus();
    if (gcd(p * c, M) != 1) throw Error(ErrorKind::SharedFactor, "gcd(pc, M) > 1");
    const i64 pcbar = mod_inv(mul_mod(p, c, M), M);
    const ExpSumValue d = d_sum(mul_mod(pcbar, mul_mod(n, l, M), M), chi);
    const ComplexValue g = gauss_sum(chi);
    const ComplexValue value = chi(p * c) * g * d.value;
    const i64 terms = d.terms * (M - 1);
    return {value, terms, std::abs(g) * d.est_error + double(terms) * 2 * kUnitTermError};
}

ExpSumValue c2_inner_sum(const DirichletCharacter& chi, i64 p, i64 c, i64 b) {
    const i64 M = chi.modulus();
    if (gcd(p * c, M) != 1) throw Error(ErrorKind::SharedFactor, "gcd(pc, M) > 1");
    const i64 coeff = mul_mod(b - 1, mod_inv(mul_mod(p, c, M), M), M);
    const RootTable roots(M);
    CompensatedSum acc;
    for (i64 a = 1; a < M; ++a) acc.add(chi(a) * roots(mul_mod(coeff, a, M)));
    return {acc.value(), M - 1, double(M - 1) * 2 * kUnitTermError};
}

}  // namespace deltasum
