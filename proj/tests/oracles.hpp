#pragma once

// Naive reference implementations: inverses by search, roots by std::polar,
// characters from a freshly built power table. Nothing here shares code
// with the library beyond the integer types.

#include "deltasum/num_core.hpp"

#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

using deltasum::i64;
using cd = std::complex<double>;

inline i64 md(i64 a, i64 m) { return ((a % m) + m) % m; }

inline cd e(i64 num, i64 den) {
    return std::polar(1.0, 2.0 * std::numbers::pi * double(md(num, den)) / double(den));
}

inline i64 inverse(i64 a, i64 m) {
    if (m == 1) return 0;
    for (i64 x = 1; x < m; ++x)
        if (md(a * x, m) == 1) return x;
    return -1;
}

// chi(g^k) = e(a k / (q-1)) against the smallest generator g.
struct Character {
    i64 q, a;
    std::vector<i64> log;
    Character(i64 q_, i64 a_) : q(q_), a(a_), log(std::size_t(q_), -1) {
        for (i64 g = 2; g < q; ++g) {
            std::fill(log.begin(), log.end(), -1);
            i64 x = 1, k = 0;
            bool ok = true;
            while (k < q - 1) {
                if (log[std::size_t(x)] != -1) {
                    ok = false;
                    break;
                }
                log[std::size_t(x)] = k++;
                x = x * g % q;
            }
            if (ok) return;
        }
        log[1] = 0;  // q = 2 is never used
    }
    cd operator()(i64 n) const {
        n = md(n, q);
        if (n == 0) return 0.0;
        return e(a * log[std::size_t(n)], q - 1);
    }
    int parity() const { return md(a * log[std::size_t(q - 1)], q - 1) == 0 ? 1 : -1; }
};

inline cd kloosterman(i64 m, i64 n, i64 c) {
    cd s = 0.0;
    for (i64 x = 0; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        s += e(m * x + n * inverse(x, c), c);
    }
    return s;
}

inline cd twisted(const Character& psi, i64 m, i64 n, i64 c) {
    cd s = 0.0;
    for (i64 x = 0; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        s += psi(x) * e(m * x + n * inverse(x, c), c);
    }
    return s;
}

inline cd ramanujan(i64 q, i64 n) {
    cd s = 0.0;
    for (i64 a = 0; a < q; ++a)
        if (std::gcd(a, q) == 1) s += e(a * n, q);
    return s;
}

inline cd gauss(const Character& chi) {
    cd s = 0.0;
    for (i64 a = 1; a < chi.q; ++a) s += chi(a) * e(a, chi.q);
    return s;
}

inline cd dsum(i64 u, const Character& chi) {
    const i64 M = chi.q;
    cd s = 0.0;
    for (i64 b = 2; b < M; ++b) s += std::conj(chi(b - 1)) * e((inverse(b, M) - 1) * u, M);
    return s;
}

}  // namespace oracle
