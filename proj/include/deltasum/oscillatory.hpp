#pragma once

#include "deltasum/characters.hpp"
#include "deltasum/report.hpp"

#include <limits>
#include <vector>

namespace deltasum {

// J_nu(x) for integer 0 <= nu <= 200 and finite x >= 0; OutOfRange otherwise.
double bessel_j(int nu, double x);

/// Smooth weight in the integral. `Bump` is exp(1 - 1/(1-t^2)) mapped onto
/// [1, 2] (peak 1 at 3/2). `Plateau` is the indicator of [3a/2, 3] convolved
/// with a bump of half-width a/2, a = M^(-4 theta): supported in [a, 4]
/// (in fact [a, 3 + a/2]) and identically 1 on [2a, 2].
class WindowFunction {
public:
    enum class Kind { Bump, Plateau };

    static WindowFunction bump();
    static WindowFunction plateau(double theta, double M);
    // Same profile, multiplied by the indicator of [lo, hi].
    WindowFunction clipped(double lo, double hi) const;

    Kind kind() const noexcept { return kind_; }
    double theta() const noexcept { return theta_; }
    double lower() const noexcept { return lower_; }
    double support_begin() const noexcept;
    double support_end() const noexcept;
    // Points where the window changes regime; quadrature panels break there.
    std::vector<double> knots() const;

    double operator()(double y) const noexcept;

private:
    WindowFunction(Kind kind, double theta, double lower) : kind_(kind), theta_(theta), lower_(lower) {}
    Kind kind_;
    double theta_;
    double lower_;
    double clip_lo_ = -std::numeric_limits<double>::infinity();
    double clip_hi_ = std::numeric_limits<double>::infinity();
};

struct IntegralParams {
    double N = 1e6;  // dyadic length
    i64 n = 1'000'000;
    i64 p = 11;
    i64 l = 3;
    i64 c = 1;
    i64 M = 10'000;
    i64 m = 1;
    int k = 43;  // weight, k = 3 mod 4
};

void validate(const IntegralParams& P);

struct IntegralResult {
    ComplexValue value{};
    double error_estimate = 0.0;
    int panels = 0;
};

// I(n, p, l; cM) = int e((N l y + n l)/(c p M)) J_{k-1}(4 pi sqrt(N n l^2 y)/(c p M)) V(y) dy
// by adaptive Gauss-Legendre bisection to the given absolute tolerance.
// QuadratureNonConvergence when refinement stalls.
IntegralResult integral_I(const IntegralParams& P, const WindowFunction& V, double abs_tol = 1e-12);

enum class CutoffMode {
    Bessel,        // N L M^eps / (P M m): c beyond this makes the integral negligible
    VoronoiLower,  // M^2 P / (N L M^eps)
    VoronoiUpper,  // M^(2 + 4 theta + eps) P / (N L)
};

struct CutoffInputs {
    double N, L, P, M;
    double m = 1.0;
    double eps = 0.01;
    double theta = 0.0;  // only used by VoronoiUpper
};

double transition_cutoff(const CutoffInputs& in, CutoffMode mode = CutoffMode::Bessel);

// Extended length max{N0, N L / (C P m)} M^eps of the Poisson dual sum.
double dual_length(double N0, double N, double L, double C, double P, double m, double M, double eps);

/// Desk-scale stand-in for the asymptotic parameter choice: M = 10^4,
/// theta = 1/154, N = M^(3/2), P = M^(20/77), L = M^(9/77), k = 43.
struct ToyScale {
    double M = 1e4;
    double theta = 1.0 / 154.0;
    double eps = 0.01;
    double N_exponent = 1.5;
    double P_exponent = 20.0 / 77.0;
    double L_exponent = 9.0 / 77.0;
    int k = 43;
    i64 m = 1;

    double N() const;
    double P() const;
    double L() const;
    double cutoff() const;  // transition_cutoff at these scales
    // Concrete integral parameters: smallest primes p in (P, 2P), l in [L, 2L],
    // n = N / m^2, and c = ceil(t * cutoff).
    IntegralParams at_multiplier(double t) const;
    WindowFunction window() const;
};

inline constexpr double kNegligible = 1e-15;
inline constexpr double kTrivialBoundCeiling = 100.0;

struct DecayPoint {
    double multiplier;
    i64 c;
    double magnitude;      // |I|
    double trivial_ratio;  // |I| N L / (c P M m)
    bool negligible_required;
    bool negligible;
};

std::vector<DecayPoint> decay_points(const ToyScale& toy, const std::vector<double>& multipliers);

// Scan |I| over c = t * cutoff: negligible for t >= 4 and trivial-bound ratio
// at most 100 everywhere.
ScanReport decay_scan(const ToyScale& toy, const std::vector<double>& multipliers);

}  // namespace deltasum
