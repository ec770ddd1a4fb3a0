#include "deltasum/exponent_opt.hpp"

#include "deltasum/error.hpp"

#include <algorithm>
#include <sstream>

namespace deltasum {

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

bool BoundProblem::feasible_point(const ExponentPoint& x) const {
    return std::all_of(constraints.begin(), constraints.end(), [&](const auto& c) { return c.holds_closed(x); });
}

namespace {

Rational q(long a, long b = 1) { return Rational(a) / Rational(b); }

ExponentForm form(const char* label, Rational c, Rational p, Rational l, Rational t) {
    return {std::move(c), std::move(p), std::move(l), std::move(t), label};
}

LinearConstraint st(const char* label, Rational p, Rational l, Rational t, Rational rhs, bool strict) {
    return {std::move(p), std::move(l), std::move(t), std::move(rhs), strict, label};
}

// ---- small dense exact LP: minimize c.z subject to A z <= b ----

struct Row {
    std::vector<Rational> a;
    Rational b;
    std::string label;
    bool box = false;
};

struct LpSolution {
    std::vector<Rational> z;
    Rational value;
    std::vector<std::size_t> active;
};

// Solves the square system M z = rhs; empty when singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> M, std::vector<Rational> rhs) {
    const std::size_t d = rhs.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        while (piv < d && M[piv][col] == 0) ++piv;
        if (piv == d) return std::nullopt;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col || M[r][col] == 0) continue;
            const Rational f = M[r][col] / M[col][col];
            for (std::size_t k = col; k < d; ++k) M[r][k] -= f * M[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < d; ++i) rhs[i] /= M[i][i];
    return rhs;
}

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& z) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * z[i];
    return s;
}

// Calls f on every d-subset of [0, n) in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t d, F&& f) {
    if (d > n) return;
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    while (true) {
        f(idx);
        std::size_t i = d;
        while (i > 0 && idx[i - 1] == n - d + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<Row> with_box(std::vector<Row> rows, std::size_t d, const Rational& B) {
    for (std::size_t i = 0; i < d; ++i) {
        Row lo{std::vector<Rational>(d), B, "box", true}, hi{std::vector<Rational>(d), B, "box", true};
        lo.a[i] = -1;
        hi.a[i] = 1;
        rows.push_back(std::move(lo));
        rows.push_back(std::move(hi));
    }
    return rows;
}

// Vertex enumeration inside the box [-B, B]^d; nullopt when empty.
std::optional<LpSolution> enumerate(const std::vector<Row>& rows, const std::vector<Rational>& c) {
    const std::size_t d = c.size();
    std::optional<LpSolution> best;
    for_each_subset(rows.size(), d, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<Rational>> M;
        std::vector<Rational> rhs;
        for (std::size_t i : idx) {
            M.push_back(rows[i].a);
            rhs.push_back(rows[i].b);
        }
        auto z = solve_square(std::move(M), std::move(rhs));
        if (!z) return;
        for (const auto& r : rows)
            if (dot(r.a, *z) > r.b) return;
        const Rational v = dot(c, *z);
        if (!best || v < best->value || (v == best->value && *z < best->z)) best = LpSolution{*z, v, {}};
    });
    if (best)
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (dot(rows[i].a, best->z) == rows[i].b) best->active.push_back(i);
    return best;
}

LpSolution lp_minimize(const std::vector<Row>& rows, const std::vector<Rational>& c) {
    const std::size_t d = c.size();
    const Rational B1 = 1024, B2 = 2048;
    auto s1 = enumerate(with_box(rows, d, B1), c);
    if (!s1) throw Error(ErrorKind::Infeasible, "constraint set is empty");
    // An optimum clear of the box is a local, hence global, optimum of the convex LP.
    const std::size_t n = rows.size();
    if (std::none_of(s1->active.begin(), s1->active.end(), [n](std::size_t i) { return i >= n; })) return *s1;
    auto s2 = enumerate(with_box(rows, d, B2), c);
    if (!s2 || s2->value != s1->value) throw Error(ErrorKind::Unbounded, "objective decreases without bound");
    return *s1;
}

// Nonnegative multipliers lambda on active rows with c + sum lambda_i a_i = 0.
std::vector<Multiplier> dual_certificate(const std::vector<Row>& rows, const LpSolution& sol,
                                         const std::vector<Rational>& c) {
    const std::size_t d = c.size();
    std::vector<Multiplier> out;
    bool found = false;
    for_each_subset(sol.active.size(), d, [&](const std::vector<std::size_t>& idx) {
        if (found) return;
        // Solve A_S^T lambda = -c.
        std::vector<std::vector<Rational>> M(d, std::vector<Rational>(d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) M[i][j] = rows[sol.active[idx[j]]].a[i];
        std::vector<Rational> rhs(d);
        for (std::size_t i = 0; i < d; ++i) rhs[i] = -c[i];
        auto lam = solve_square(std::move(M), std::move(rhs));
        if (!lam) return;
        if (std::any_of(lam->begin(), lam->end(), [](const Rational& x) { return x < 0; })) return;
        Rational bound = 0;
        for (std::size_t j = 0; j < d; ++j) bound -= (*lam)[j] * rows[sol.active[idx[j]]].b;
        if (bound != sol.value) return;
        found = true;
        for (std::size_t j = 0; j < d; ++j) {
            const auto& r = rows[sol.active[idx[j]]];
            if ((*lam)[j] != 0 && !r.box) out.push_back({r.label, (*lam)[j]});
        }
    });
    if (!found) throw Error(ErrorKind::Unbounded, "no dual certificate at the optimal vertex");
    return out;
}

std::vector<Row> epigraph_rows(const BoundProblem& prob) {
    std::vector<Row> rows;
    for (const auto& f : prob.forms) rows.push_back({{f.coeff_xP, f.coeff_xL, f.coeff_theta, -1}, -f.constant, f.label});
    for (const auto& s : prob.constraints) rows.push_back({{s.a_xP, s.a_xL, s.a_theta, 0}, s.rhs, s.label});
    return rows;
}

std::vector<Row> region_rows(const BoundProblem& prob) {
    std::vector<Row> rows;
    for (const auto& s : prob.constraints) rows.push_back({{s.a_xP, s.a_xL, s.a_theta}, s.rhs, s.label});
    return rows;
}

std::vector<std::size_t> attaining(const BoundProblem& prob, const ExponentPoint& x, const Rational& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < prob.forms.size(); ++i)
        if (prob.forms[i].at(x) == v) out.push_back(i);
    return out;
}

bool strict_ok(const BoundProblem& prob, const ExponentPoint& x) {
    return std::all_of(prob.constraints.begin(), prob.constraints.end(), [&](const auto& c) { return c.holds(x); });
}

// Certificate for a given candidate point, built from the epigraph LP rows.
std::vector<Multiplier> certify(const BoundProblem& prob, const ExponentPoint& x, const Rational& v) {
    const auto rows = epigraph_rows(prob);
    LpSolution sol{{x.xP, x.xL, x.theta, v}, v, {}};
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (dot(rows[i].a, sol.z) == rows[i].b) sol.active.push_back(i);
    try {
        return dual_certificate(rows, sol, {0, 0, 0, 1});
    } catch (const Error&) {
        throw Error(ErrorKind::ShapeMismatch, "balanced point is not optimal");
    }
}

ExponentForm substitute_xL(const ExponentForm& f, const AffineExpr& e) {
    return {f.constant + f.coeff_xL * e.constant, f.coeff_xP + f.coeff_xL * e.coeff_xP, 0,
            f.coeff_theta + f.coeff_xL * e.coeff_theta, f.label};
}

ExponentForm substitute_xP(const ExponentForm& f, const AffineExpr& e) {
    return {f.constant + f.coeff_xP * e.constant, 0, f.coeff_xL, f.coeff_theta + f.coeff_xP * e.coeff_theta, f.label};
}

// Indices of forms whose coefficient (selected by `get`) is nonzero; must be
// exactly two with opposite signs.
template <class Get>
std::pair<std::size_t, std::size_t> opposing_pair(const std::vector<ExponentForm>& fs, Get get, const char* what) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (get(fs[i]) != 0) idx.push_back(i);
    if (idx.size() != 2 || get(fs[idx[0]]) * get(fs[idx[1]]) >= 0)
        throw Error(ErrorKind::ShapeMismatch, std::string("no unique opposing pair in ") + what);
    return {idx[0], idx[1]};
}

}  // namespace

BoundProblem paper_bound_problem(bool include_post_hoc) {
    BoundProblem p;
    p.forms = {
        form("T1", q(1, 2), q(1, 2), 0, 9),
        form("T2", q(5, 8), q(1, 4), q(1, 4), q(17, 4)),
        form("T3", q(1, 2), 1, q(-1, 2), 7),
        form("T4", q(3, 4), -1, 1, q(3, 2)),
        form("T5", 1, -1, 0, 1),
        form("T6", q(3, 4), 0, 0, q(-1, 2)),
    };
    p.constraints = {
        st("L<P", -1, 1, 0, 0, true),
        st("theta<1/2", 0, 0, 1, q(1, 2), true),
        st("2theta<=L", 0, -1, 2, 0, false),
        st("L<1/2", 0, 1, 0, q(1, 2), true),
        st("theta>=0", 0, 0, -1, 0, false),
    };
    if (include_post_hoc) p.constraints.push_back(st("4theta+L<=P", -1, 1, 4, 0, false));
    return p;
}

Rational evaluate_bound(const BoundProblem& prob, const ExponentPoint& x) {
    if (prob.forms.empty()) throw Error(ErrorKind::ShapeMismatch, "problem has no forms");
    for (const auto& c : prob.constraints)
        if (!c.holds_closed(x)) throw Error(ErrorKind::InfeasiblePoint, "point violates " + c.label);
    Rational best = prob.forms.front().at(x);
    for (const auto& f : prob.forms) best = std::max(best, f.at(x));
    return best;
}

OptimizationResult minimize_max(const BoundProblem& prob) {
    if (prob.forms.empty()) throw Error(ErrorKind::ShapeMismatch, "problem has no forms");
    const auto rows = epigraph_rows(prob);
    const std::vector<Rational> c{0, 0, 0, 1};
    const LpSolution sol = lp_minimize(rows, c);
    OptimizationResult r;
    r.point = {sol.z[0], sol.z[1], sol.z[2]};
    r.value = evaluate_bound(prob, r.point);
    r.active_terms = attaining(prob, r.point, r.value);
    r.certificate = dual_certificate(with_box(rows, 4, 1024), sol, c);
    r.strict_constraints_hold = strict_ok(prob, r.point);
    return r;
}

StagedTrace staged_elimination(const BoundProblem& prob) {
    StagedTrace tr;
    const auto region = region_rows(prob);
    const std::size_t nf = prob.forms.size();
    std::vector<bool> dropped(nf, false);
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = 0; j < nf && !dropped[i]; ++j) {
            if (j == i || dropped[j]) continue;
            const auto& a = prob.forms[j];
            const auto& b = prob.forms[i];
            try {
                const auto s = lp_minimize(region, {a.coeff_xP - b.coeff_xP, a.coeff_xL - b.coeff_xL,
                                                    a.coeff_theta - b.coeff_theta});
                if (s.value + a.constant - b.constant >= 0) dropped[i] = true;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Unbounded) throw;
            }
        }
        if (dropped[i]) tr.dropped.push_back(i);
    }

    std::vector<ExponentForm> live;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < nf; ++i)
        if (!dropped[i]) {
            live.push_back(prob.forms[i]);
            origin.push_back(i);
        }

    // Balance the x_L pair.
    auto [a, b] = opposing_pair(live, [](const ExponentForm& f) { return f.coeff_xL; }, "x_L");
    {
        const auto& fa = live[a];
        const auto& fb = live[b];
        const Rational k = fa.coeff_xL - fb.coeff_xL;
        tr.xL_choice = {(fb.constant - fa.constant) / k, (fb.coeff_xP - fa.coeff_xP) / k,
                        (fb.coeff_theta - fa.coeff_theta) / k};
        tr.after_xL = substitute_xL(fa, tr.xL_choice);
        tr.after_xL.label = fa.label + "=" + fb.label;
    }
    std::vector<ExponentForm> stage2{tr.after_xL};
    std::vector<std::size_t> origin2{nf};  // nf marks the merged term
    for (std::size_t i = 0; i < live.size(); ++i)
        if (i != a && i != b) {
            stage2.push_back(live[i]);
            origin2.push_back(origin[i]);
        }

    // Balance the x_P pair.
    auto [c, d] = opposing_pair(stage2, [](const ExponentForm& f) { return f.coeff_xP; }, "x_P");
    {
        const auto& fc = stage2[c];
        const auto& fd = stage2[d];
        const Rational k = fc.coeff_xP - fd.coeff_xP;
        tr.xP_choice = {(fd.constant - fc.constant) / k, 0, (fd.coeff_theta - fc.coeff_theta) / k};
        tr.after_xP = substitute_xP(fc, tr.xP_choice);
        tr.after_xP.label = fc.label + "=" + fd.label;
    }
    std::vector<ExponentForm> stage3{tr.after_xP};
    std::vector<std::size_t> origin3{nf};
    for (std::size_t i = 0; i < stage2.size(); ++i)
        if (i != c && i != d) {
            stage3.push_back(stage2[i]);
            origin3.push_back(origin2[i]);
        }

    // Solve for theta.
    auto [e, f] = opposing_pair(stage3, [](const ExponentForm& g) { return g.coeff_theta; }, "theta");
    if (origin3[e] == nf) {
        tr.theta_partner = origin3[f];
    } else if (origin3[f] == nf) {
        tr.theta_partner = origin3[e];
    } else {
        throw Error(ErrorKind::ShapeMismatch, "theta pair does not involve the merged term");
    }
    const Rational theta = (stage3[f].constant - stage3[e].constant) / (stage3[e].coeff_theta - stage3[f].coeff_theta);

    ExponentPoint x;
    x.theta = theta;
    x.xP = tr.xP_choice.constant + tr.xP_choice.coeff_theta * theta;
    x.xL = tr.xL_choice.constant + tr.xL_choice.coeff_xP * x.xP + tr.xL_choice.coeff_theta * theta;
    if (!prob.feasible_point(x)) throw Error(ErrorKind::ShapeMismatch, "balanced point is infeasible");

    auto& r = tr.result;
    r.point = x;
    r.value = evaluate_bound(prob, x);
    if (r.value != tr.after_xP.constant + tr.after_xP.coeff_theta * theta)
        throw Error(ErrorKind::ShapeMismatch, "a dropped or unpaired term exceeds the balanced value");
    r.active_terms = attaining(prob, x, r.value);
    r.certificate = certify(prob, x, r.value);
    r.strict_constraints_hold = strict_ok(prob, x);
    return tr;
}

}  // namespace deltasum
