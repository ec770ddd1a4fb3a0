#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace deltasum {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& q);

// Exponent triple (x_P, x_L, theta): P = M^x_P, L = M^x_L.
struct ExponentPoint {
    Rational xP, xL, theta;
    bool operator==(const ExponentPoint&) const = default;
};

/// Exponent of M in one term of the bound:
/// constant + coeff_xP x_P + coeff_xL x_L + coeff_theta theta.
struct ExponentForm {
    Rational constant, coeff_xP, coeff_xL, coeff_theta;
    std::string label;

    Rational at(const ExponentPoint& x) const {
        return constant + coeff_xP * x.xP + coeff_xL * x.xL + coeff_theta * x.theta;
    }
    bool same_coefficients(const ExponentForm& o) const {
        return constant == o.constant && coeff_xP == o.coeff_xP && coeff_xL == o.coeff_xL &&
               coeff_theta == o.coeff_theta;
    }
};

// a_xP x_P + a_xL x_L + a_theta theta <= rhs  (or < rhs when strict).
struct LinearConstraint {
    Rational a_xP, a_xL, a_theta, rhs;
    bool strict = false;
    std::string label;

    Rational lhs(const ExponentPoint& x) const { return a_xP * x.xP + a_xL * x.xL + a_theta * x.theta; }
    bool holds_closed(const ExponentPoint& x) const { return lhs(x) <= rhs; }
    bool holds(const ExponentPoint& x) const { return strict ? lhs(x) < rhs : lhs(x) <= rhs; }
};

/// min over (x_P, x_L, theta) of max_i form_i subject to the constraints.
struct BoundProblem {
    std::vector<ExponentForm> forms;
    std::vector<LinearConstraint> constraints;

    bool feasible_point(const ExponentPoint& x) const;  // closure of the constraints
};

struct Multiplier {
    std::string row;
    Rational value;
};

struct OptimizationResult {
    ExponentPoint point;
    Rational value;
    std::vector<std::size_t> active_terms;  // forms attaining the max
    std::vector<Multiplier> certificate;    // nonnegative LP dual multipliers
    bool strict_constraints_hold = false;
};

/// Six terms and five constraints of the final bound with N = M^(3/2).
/// With `include_post_hoc` the relation 4 theta + x_L <= x_P is a constraint.
BoundProblem paper_bound_problem(bool include_post_hoc = true);

// max of all forms at a feasible point; InfeasiblePoint otherwise.
Rational evaluate_bound(const BoundProblem& prob, const ExponentPoint& x);

// Exact epigraph LP {min t : form_i <= t, constraints} by vertex enumeration
// with an LP-duality certificate. Infeasible / Unbounded on failure.
OptimizationResult minimize_max(const BoundProblem& prob);

// x = constant + sum coefficients; used to record substitutions.
struct AffineExpr {
    Rational constant, coeff_xP, coeff_theta;
};

struct StagedTrace {
    std::vector<std::size_t> dropped;     // forms dominated on the feasible region
    AffineExpr xL_choice;                 // x_L as a function of (x_P, theta)
    ExponentForm after_xL;                // merged term once x_L is eliminated
    AffineExpr xP_choice;                 // x_P as a function of theta (coeff_xP == 0)
    ExponentForm after_xP;                // merged term once x_P is eliminated
    std::size_t theta_partner = 0;        // form equated with it to fix theta
    OptimizationResult result;
};

// Pairwise equalisation: drop dominated terms, balance the two terms with
// opposite x_L slopes, then the x_P pair, then solve for theta.
// ShapeMismatch when a unique pairing does not exist.
StagedTrace staged_elimination(const BoundProblem& prob);

// Problem description: `form: c + p*xP + l*xL + t*th` and
// `st: a*xP + b*xL + c*th <= d` lines; `#` starts a comment.
BoundProblem parse_problem(const std::string& text);
std::string format_problem(const BoundProblem& prob);

}  // namespace deltasum
