#include "deltasum/error.hpp"
#include "deltasum/exponent_opt.hpp"

#include <cctype>
#include <sstream>

namespace deltasum {

namespace {

struct Affine {
    Rational c, xP, xL, th;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + msg);
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

// "7", "3/4" or "0.125", exactly.
Rational parse_rational(const std::string& s, int line) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        if (!all_digits(a) || !all_digits(b)) fail(line, "bad rational '" + s + "'");
        const Rational den{boost::multiprecision::cpp_int(b)};
        if (den == 0) fail(line, "zero denominator in '" + s + "'");
        return Rational{boost::multiprecision::cpp_int(a)} / den;
    }
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        const std::string a = s.substr(0, dot), b = s.substr(dot + 1);
        if ((!a.empty() && !all_digits(a)) || !all_digits(b)) fail(line, "bad number '" + s + "'");
        Rational scale = 1;
        for (std::size_t i = 0; i < b.size(); ++i) scale *= 10;
        return Rational{boost::multiprecision::cpp_int(a.empty() ? "0" : a)} +
               Rational{boost::multiprecision::cpp_int(b)} / scale;
    }
    if (!all_digits(s)) fail(line, "bad number '" + s + "'");
    return Rational{boost::multiprecision::cpp_int(s)};
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Sum of terms `[+-] coef [* var]` or `[+-] var`; whitespace already removed.
Affine parse_affine(const std::string& s, int line) {
    if (s.empty()) fail(line, "empty expression");
    Affine out;
    std::size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        } else if (i != 0) {
            fail(line, "expected '+' or '-'");
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
        std::string term = s.substr(i, j - i);
        if (term.empty()) fail(line, "missing term");
        Rational* slot = &out.c;
        for (auto [name, ptr] : {std::pair{"xP", &out.xP}, {"xL", &out.xL}, {"th", &out.th}}) {
            if (ends_with(term, name)) {
                slot = ptr;
                term.resize(term.size() - 2);
                if (!term.empty()) {
                    if (term.back() != '*') fail(line, "expected '*' before variable");
                    term.pop_back();
                    if (term.empty()) fail(line, "missing coefficient");
                }
                break;
            }
        }
        const Rational coef = (term.empty() && slot != &out.c) ? Rational(1) : parse_rational(term, line);
        *slot += sign * coef;
        i = j;
    }
    return out;
}

std::string strip(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    return s;
}

std::string term(const Rational& coef, const char* var) {
    std::string sign = coef < 0 ? " - " : " + ";
    return sign + to_string(abs(coef)) + "*" + var;
}

}  // namespace

BoundProblem parse_problem(const std::string& text) {
    BoundProblem prob;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        const std::string s = strip(raw);
        if (s.empty()) continue;
        const auto colon = s.find(':');
        if (colon == std::string::npos) fail(line, "expected 'form:' or 'st:'");
        const std::string head = s.substr(0, colon), body = s.substr(colon + 1);
        if (head.rfind("form", 0) == 0) {
            std::string label = head.substr(4);
            if (label.empty()) label = "T" + std::to_string(prob.forms.size() + 1);
            const Affine a = parse_affine(body, line);
            prob.forms.push_back({a.c, a.xP, a.xL, a.th, label});
        } else if (head.rfind("st", 0) == 0) {
            std::string label = head.substr(2);
            if (label.empty()) label = "c" + std::to_string(prob.constraints.size() + 1);
            bool strict = false;
            auto op = body.find("<=");
            std::size_t width = 2;
            if (op == std::string::npos) {
                op = body.find('<');
                width = 1;
                strict = true;
            }
            if (op == std::string::npos) fail(line, "constraint needs '<=' or '<'");
            const Affine l = parse_affine(body.substr(0, op), line);
            const Affine r = parse_affine(body.substr(op + width), line);
            prob.constraints.push_back({l.xP - r.xP, l.xL - r.xL, l.th - r.th, r.c - l.c, strict, label});
        } else {
            fail(line, "unknown directive '" + head + "'");
        }
    }
    if (prob.forms.empty()) throw Error(ErrorKind::ParseError, "problem has no forms");
    return prob;
}

std::string format_problem(const BoundProblem& prob) {
    std::string out;
    for (const auto& f : prob.forms)
        out += "form " + f.label + ": " + to_string(f.constant) + term(f.coeff_xP, "xP") + term(f.coeff_xL, "xL") +
               term(f.coeff_theta, "th") + "\n";
    for (const auto& c : prob.constraints) {
        std::string lhs = term(c.a_xP, "xP") + term(c.a_xL, "xL") + term(c.a_theta, "th");
        lhs = lhs.substr(1);  // leading space
        if (lhs[0] == '+') lhs = lhs.substr(2);
        out += "st " + c.label + ": " + lhs + (c.strict ? " < " : " <= ") + to_string(c.rhs) + "\n";
    }
    return out;
}

}  // namespace deltasum
