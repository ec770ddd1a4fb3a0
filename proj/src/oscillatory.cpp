#include "deltasum/oscillatory.hpp"

#include "deltasum/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace deltasum {

namespace {

constexpr int kGaussOrder = 20;

struct GaussRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev guess.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        GaussRule r;
        const int n = kGaussOrder;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            r.nodes[std::size_t(i)] = x;
            r.weights[std::size_t(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <class F>
auto gauss_panel(const F& f, double a, double b) {
    const GaussRule& g = gauss_rule();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(a)) sum{};
    for (int i = 0; i < kGaussOrder; ++i) sum += g.weights[std::size_t(i)] * f(mid + half * g.nodes[std::size_t(i)]);
    return sum * half;
}

double bump_profile(double t) noexcept {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// Normalised cumulative integral of the bump on [-1, 1].
double bump_cdf(double s) {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    static const double total = [] {
        double acc = 0.0;
        for (int j = 0; j < 8; ++j) acc += gauss_panel(bump_profile, -1.0 + j * 0.25, -1.0 + (j + 1) * 0.25);
        return acc;
    }();
    double acc = 0.0;
    const int panels = 8;
    const double w = (s + 1.0) / panels;
    for (int j = 0; j < panels; ++j) acc += gauss_panel(bump_profile, -1.0 + j * w, -1.0 + (j + 1) * w);
    return std::clamp(acc / total, 0.0, 1.0);
}

}  // namespace

WindowFunction WindowFunction::bump() { return WindowFunction(Kind::Bump, 0.0, 1.0); }

WindowFunction WindowFunction::plateau(double theta, double M) {
    if (!(theta >= 0.0) || !(M > 1.0))
        throw Error(ErrorKind::OutOfRange, "plateau window needs theta >= 0 and M > 1");
    return WindowFunction(Kind::Plateau, theta, std::pow(M, -4.0 * theta));
}

WindowFunction WindowFunction::clipped(double lo, double hi) const {
    WindowFunction w = *this;
    w.clip_lo_ = std::max(clip_lo_, lo);
    w.clip_hi_ = std::min(clip_hi_, hi);
    return w;
}

double WindowFunction::support_begin() const noexcept {
    return std::max(kind_ == Kind::Bump ? 1.0 : lower_, clip_lo_);
}

double WindowFunction::support_end() const noexcept {
    return std::min(kind_ == Kind::Bump ? 2.0 : 3.0 + 0.5 * lower_, clip_hi_);
}

std::vector<double> WindowFunction::knots() const {
    std::vector<double> k;
    if (kind_ == Kind::Bump)
        k = {1.0, 1.5, 2.0};
    else
        k = {lower_, 2.0 * lower_, 3.0 - 0.5 * lower_, 3.0 + 0.5 * lower_};
    std::vector<double> out;
    const double a = support_begin(), b = support_end();
    out.push_back(a);
    for (double x : k)
        if (x > a && x < b) out.push_back(x);
    out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

double WindowFunction::operator()(double y) const noexcept {
    if (y < clip_lo_ || y > clip_hi_) return 0.0;
    if (kind_ == Kind::Bump) return bump_profile(2.0 * (y - 1.5));
    const double a = lower_;
    const double half = 0.5 * a;
    if (1.5 * a >= 3.0) return 0.0;
    if (y <= a || y >= 3.0 + half) return 0.0;
    if (y >= 2.0 * a && y <= 3.0 - half) return 1.0;
    return bump_cdf((y - 1.5 * a) / half) - bump_cdf((y - 3.0) / half);
}

void validate(const IntegralParams& P) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::OutOfRange, why); };
    if (!(P.N > 0.0) || !std::isfinite(P.N)) fail("N must be positive");
    if (P.n < 1 || P.p < 2 || P.l < 2 || P.c < 1 || P.M < 2 || P.m < 1) fail("integral parameters must be positive");
    if (P.k < 7 || P.k - 1 > 200) fail("weight k must satisfy 7 <= k <= 201");
    if (P.k % 4 != 3) fail("weight k must be 3 mod 4");
}

IntegralResult integral_I(const IntegralParams& P, const WindowFunction& V, double abs_tol) {
    validate(P);
    IntegralResult out;
    const double a = V.support_begin(), b = V.support_end();
    if (!(b > a)) return out;

    const double denom = double(P.c) * double(P.p) * double(P.M);
    const double freq = P.N * double(P.l) / denom;  // cycles per unit y of the linear phase
    const double amp = 4.0 * std::numbers::pi * double(P.l) * std::sqrt(P.N * double(P.n)) / denom;
    const ComplexValue base = unit_root(mul_mod(P.n, P.l, i64(P.c) * P.p * P.M), i64(P.c) * P.p * P.M);
    const int order = P.k - 1;

    auto f = [&](double y) -> ComplexValue {
        const double w = V(y);
        if (w == 0.0) return {0.0, 0.0};
        const double t = 2.0 * std::numbers::pi * freq * y;
        return ComplexValue(std::cos(t), std::sin(t)) * (bessel_j(order, amp * std::sqrt(y)) * w);
    };

    // Panels no wider than one combined oscillation of phase and Bessel kernel.
    const double bessel_freq = amp / (4.0 * std::numbers::pi * std::sqrt(a));
    const double width_cap = 1.0 / (freq + bessel_freq + 1.0);

    struct Panel {
        double lo, hi;
        ComplexValue estimate;
        int depth;
    };
    std::vector<Panel> stack;
    const auto knots = V.knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1];
        if (!(hi > lo)) continue;
        const int pieces = std::max(1, int(std::ceil((hi - lo) / width_cap)));
        for (int j = 0; j < pieces; ++j) {
            const double x0 = lo + (hi - lo) * j / pieces;
            const double x1 = j + 1 == pieces ? hi : lo + (hi - lo) * (j + 1) / pieces;
            stack.push_back({x0, x1, gauss_panel(f, x0, x1), 0});
        }
    }
    const double total_width = b - a;
    constexpr int kMaxDepth = 40;
    constexpr int kMaxPanels = 2'000'000;
    ComplexValue sum{};
    while (!stack.empty()) {
        const Panel pnl = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (pnl.lo + pnl.hi);
        const ComplexValue left = gauss_panel(f, pnl.lo, mid);
        const ComplexValue right = gauss_panel(f, mid, pnl.hi);
        const double diff = std::abs(left + right - pnl.estimate);
        const double allowed = abs_tol * (pnl.hi - pnl.lo) / total_width;
        if (diff <= allowed || diff <= 1e-15 * std::abs(left + right)) {
            sum += left + right;
            out.error_estimate += diff;
            ++out.panels;
            continue;
        }
        if (pnl.depth >= kMaxDepth || out.panels + int(stack.size()) > kMaxPanels)
            throw Error(ErrorKind::QuadratureNonConvergence,
                        "refinement stalled near y = " + std::to_string(mid));
        stack.push_back({mid, pnl.hi, right, pnl.depth + 1});
        stack.push_back({pnl.lo, mid, left, pnl.depth + 1});
    }
    out.value = base * sum;
    return out;
}

double transition_cutoff(const CutoffInputs& in, CutoffMode mode) {
    const double Me = std::pow(in.M, in.eps);
    switch (mode) {
        case CutoffMode::Bessel:
            return in.N * in.L * Me / (in.P * in.M * in.m);
        case CutoffMode::VoronoiLower:
            return in.M * in.M * in.P / (in.N * in.L * Me);
        case CutoffMode::VoronoiUpper:
            return std::pow(in.M, 2.0 + 4.0 * in.theta) * Me * in.P / (in.N * in.L);
    }
    return 0.0;
}

double dual_length(double N0, double N, double L, double C, double P, double m, double M, double eps) {
    return std::max(N0, N * L / (C * P * m)) * std::pow(M, eps);
}

double ToyScale::N() const { return std::pow(M, N_exponent); }
double ToyScale::P() const { return std::pow(M, P_exponent); }
double ToyScale::L() const { return std::pow(M, L_exponent); }

double ToyScale::cutoff() const {
    return transition_cutoff({N(), L(), P(), M, double(m), eps, theta}, CutoffMode::Bessel);
}

IntegralParams ToyScale::at_multiplier(double t) const {
    IntegralParams ip;
    ip.N = N();
    const double Pv = P(), Lv = L();
    const auto ps = primes_between(i64(std::floor(Pv)), i64(std::ceil(2.0 * Pv)));
    const auto ls = primes_between(i64(std::ceil(Lv)) - 1, i64(std::floor(2.0 * Lv)) + 1);
    auto first_above = [](const std::vector<i64>& v, double lo, double hi) {
        for (i64 x : v)
            if (double(x) > lo && double(x) < hi) return x;
        throw Error(ErrorKind::ParameterInconsistency, "no prime in the dyadic range");
    };
    ip.p = first_above(ps, Pv, 2.0 * Pv);
    ip.l = first_above(ls, Lv - 1e-9, 2.0 * Lv + 1e-9);
    ip.n = std::max<i64>(1, i64(std::llround(ip.N / double(m * m))));
    ip.M = i64(std::llround(M));
    ip.m = m;
    ip.k = k;
    ip.c = std::max<i64>(1, i64(std::ceil(t * cutoff())));
    return ip;
}

WindowFunction ToyScale::window() const { return WindowFunction::plateau(theta, M); }

std::vector<DecayPoint> decay_points(const ToyScale& toy, const std::vector<double>& multipliers) {
    std::vector<DecayPoint> out;
    const WindowFunction V = toy.window();
    for (double t : multipliers) {
        const IntegralParams ip = toy.at_multiplier(t);
        const IntegralResult r = integral_I(ip, V);
        DecayPoint d{};
        d.multiplier = t;
        d.c = ip.c;
        d.magnitude = std::abs(r.value);
        d.trivial_ratio = d.magnitude * toy.N() * toy.L() / (double(ip.c) * toy.P() * toy.M * double(toy.m));
        d.negligible_required = t >= 4.0;
        d.negligible = d.magnitude <= kNegligible;
        out.push_back(d);
    }
    return out;
}

ScanReport decay_scan(const ToyScale& toy, const std::vector<double>& multipliers) {
    const auto start = std::chrono::steady_clock::now();
    ScanReport rep;
    rep.suite = "bessel-decay";
    rep.grid = {{"M", toy.M}, {"theta", toy.theta}, {"eps", toy.eps}, {"k", toy.k}, {"m", toy.m},
                {"multipliers", multipliers}};
    rep.tolerance = 1.0;
    Json points = Json::array();
    for (const DecayPoint& d : decay_points(toy, multipliers)) {
        // Normalised violation: > 1 breaks either the negligibility or the trivial-bound ceiling.
        double dev = d.trivial_ratio / kTrivialBoundCeiling;
        if (d.negligible_required) dev = std::max(dev, d.magnitude / kNegligible);
        if (rep.cases == 0 || dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_witness = {{"multiplier", d.multiplier}, {"c", d.c}};
        }
        ++rep.cases;
        points.push_back({{"t", d.multiplier}, {"c", d.c}, {"abs_I", d.magnitude},
                          {"trivial_ratio", d.trivial_ratio}, {"negligible", d.negligible}});
    }
    rep.metrics = {{"cutoff", toy.cutoff()}, {"points", points}};
    rep.passed = rep.max_deviation <= rep.tolerance;
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace deltasum
