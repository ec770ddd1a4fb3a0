#include "deltasum/error.hpp"
#include "deltasum/oscillatory.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace deltasum {

namespace {

constexpr int kMaxOrder = 200;

// Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!); used only
// where x^2/4 is small against nu+1 so the alternation does not cancel.
double series(int nu, double x) {
    const double h = 0.5 * x;
    double lead = 1.0;
    for (int k = 1; k <= nu; ++k) lead *= h / k;
    if (lead == 0.0) return 0.0;
    const double h2 = h * h;
    double term = lead, sum = lead;
    for (int k = 1; k < 500; ++k) {
        term *= -h2 / (double(k) * double(k + nu));
        sum += term;
        if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

// Hankel expansion, valid for x >> nu^2.
double hankel(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double P = 1.0, Q = 0.0;
    double term = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double prev = std::fabs(term);
        term *= (mu - odd * odd) / (double(k) * 8.0 * x);
        if (std::fabs(term) > prev) break;  // asymptotic series has turned
        if (k % 2 == 1)
            Q += (k % 4 == 1 ? 1.0 : -1.0) * term;
        else
            P += (k % 4 == 2 ? -1.0 : 1.0) * term;
        if (std::fabs(term) < 1e-17) break;
    }
    // cos(x - phi) and sin(x - phi) expanded so the large argument is reduced by libm.
    const double phi = (0.5 * nu + 0.25) * std::numbers::pi;
    const double cx = std::cos(x), sx = std::sin(x);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double c = cx * cp + sx * sp;
    const double s = sx * cp - cx * sp;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (P * c - Q * s);
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_2k = 1.
double miller(int nu, double x) {
    const double top = std::max(double(nu), x) + 30.0 + 10.0 * std::cbrt(x);
    int start = int(std::ceil(top));
    start += start % 2;
    double next = 0.0, cur = 1e-300, result = 0.0, norm = 0.0;
    const double two_over_x = 2.0 / x;
    for (int j = start; j > 0; --j) {
        const double prev = j * two_over_x * cur - next;
        next = cur;
        cur = prev;  // now J_{j-1}
        if (j - 1 == nu) result = cur;
        if ((j - 1) % 2 == 0 && j - 1 > 0) norm += 2.0 * cur;
        if (std::fabs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;  // J_0
    return result / norm;
}

}  // namespace

double bessel_j(int nu, double x) {
    if (nu < 0 || nu > kMaxOrder)
        throw Error(ErrorKind::OutOfRange, "bessel order " + std::to_string(nu) + " outside [0, 200]");
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorKind::OutOfRange, "bessel argument must be finite and >= 0");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    if (x * x <= double(nu + 1)) return series(nu, x);
    if (x > std::max(1e4, 4.0 * nu * nu)) return hankel(nu, x);
    return miller(nu, x);
}

}  // namespace deltasum
