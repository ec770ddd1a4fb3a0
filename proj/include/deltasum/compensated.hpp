#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace deltasum {

// Neumaier summation, applied independently to real and imaginary parts.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedSum {
public:
    void add(std::complex<double> z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    NeumaierSum re_;
    NeumaierSum im_;
};

// Per-summand rounding allowance for a unit-modulus root of unity taken from
// a table (a few ulps on each component).
inline constexpr double kUnitTermError = 0x1p-50;

}  // namespace deltasum
