#pragma once

#include "deltasum/num_core.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace deltasum {

using ComplexValue = std::complex<double>;

// Discrete logarithms and (q-1)-th roots of unity for one prime modulus.
// Built once per modulus and shared read-only.
struct DlogTable {
    i64 q = 0;
    i64 generator = 0;
    std::vector<i64> log;             // log[n] for 1 <= n < q, log[0] unused
    std::vector<i64> power;           // power[k] = g^k mod q, 0 <= k < q-1
    std::vector<ComplexValue> roots;  // roots[k] = e(k / (q-1))

    static std::shared_ptr<const DlogTable> get(i64 q);  // NotPrime for bad q
};

/// Dirichlet character modulo an odd prime q, identified by its index a
/// against the smallest primitive root g: chi(g^k) = e(a k / (q-1)).
class DirichletCharacter {
public:
    DirichletCharacter(i64 q, i64 index);

    i64 modulus() const noexcept { return table_->q; }
    i64 generator() const noexcept { return table_->generator; }
    i64 index() const noexcept { return index_; }
    bool is_principal() const noexcept { return index_ == 0; }

    ComplexValue operator()(i64 n) const noexcept;
    // Exact argument of chi(n) for n coprime to q.
    RationalAngle angle(i64 n) const;

    DirichletCharacter conj() const;
    // chi(-1) as +1 / -1.
    int parity() const noexcept;

    static DirichletCharacter legendre(i64 q);

    bool operator==(const DirichletCharacter& o) const noexcept {
        return modulus() == o.modulus() && index_ == o.index_;
    }

private:
    std::shared_ptr<const DlogTable> table_;
    i64 index_;
};

// All q-1 characters modulo the prime q, by ascending index.
std::vector<DirichletCharacter> enumerate_characters(i64 q);

inline ComplexValue eval(const DirichletCharacter& chi, i64 n) { return chi(n); }
inline int parity(const DirichletCharacter& chi) { return chi.parity(); }

// sum_{a mod q} chi(a) e(a/q) by direct summation; q <= 10^6.
ComplexValue gauss_sum(const DirichletCharacter& chi);

}  // namespace deltasum
