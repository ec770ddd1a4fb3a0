#include "cli_support.hpp"

#include "deltasum/error.hpp"
#include "deltasum/exponent_opt.hpp"
#include "deltasum/expsums.hpp"
#include "deltasum/oscillatory.hpp"
#include "deltasum/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace deltasum;
namespace dc = deltasum::cli;

namespace {

// Exit codes.
constexpr int kOk = 0, kSuiteFailed = 1, kUsage = 2, kComputation = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    std::string text;
    int code = kOk;
    std::string ledger_row;  // verify only
};

enum class Mode { Plain, Json, Csv };

std::string num(double x) { return Json(x).dump(); }

std::string csv_field(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// ---- sum ----

struct SumArgs {
    std::string kind;
    std::optional<i64> m, n, c, q, u, v, modulus, chi_index, psi_index;
    std::optional<i64> c2, q2_content, p, p_prime, q1, m2, h, r_prime, l, l_prime;
    std::string route = "closed";
};

i64 need(const std::optional<i64>& x, const char* flag, const std::string& kind) {
    if (!x) throw UsageError("sum " + kind + " needs " + flag);
    return *x;
}

Output run_sum(const SumArgs& a, Mode mode) {
    const std::string& k = a.kind;
    Json params = Json::object();
    ExpSumValue v;
    std::optional<i64> integer;
    auto character = [&](const std::optional<i64>& idx, const char* flag) {
        const i64 q = need(a.modulus, "--modulus", k);
        params["modulus"] = q;
        std::string key = flag + 2;
        std::replace(key.begin(), key.end(), '-', '_');
        params[key] = need(idx, flag, k);
        return DirichletCharacter(q, *idx);
    };
    if (k == "kloosterman") {
        params = {{"m", need(a.m, "--m", k)}, {"n", need(a.n, "--n", k)}, {"c", need(a.c, "--c", k)}};
        v = kloosterman(*a.m, *a.n, *a.c);
    } else if (k == "twisted") {
        const DirichletCharacter psi = character(a.psi_index, "--psi-index");
        params["m"] = need(a.m, "--m", k);
        params["n"] = need(a.n, "--n", k);
        params["c"] = need(a.c, "--c", k);
        v = twisted_kloosterman(psi, *a.m, *a.n, *a.c);
    } else if (k == "gauss") {
        const DirichletCharacter chi = character(a.chi_index, "--chi-index");
        v = {gauss_sum(chi), chi.modulus(), 0.0};
    } else if (k == "ramanujan") {
        params = {{"q", need(a.q, "--q", k)}, {"n", need(a.n, "--n", k)}};
        integer = ramanujan_sum(*a.q, *a.n);
        v = {ComplexValue(double(*integer), 0.0), euler_phi(*a.q), 0.0};
    } else if (k == "dsum") {
        const DirichletCharacter chi = character(a.chi_index, "--chi-index");
        params["u"] = need(a.u, "--u", k);
        v = d_sum(*a.u, chi);
    } else if (k == "c3") {
        const DirichletCharacter chi = character(a.chi_index, "--chi-index");
        params["v"] = need(a.v, "--v", k);
        params["route"] = a.route;
        if (a.route == "raw")
            v = c3_raw(*a.v, chi);
        else if (a.route == "pair")
            v = c3_pair_sum(*a.v, chi);
        else
            v = c3_closed(*a.v, chi);
    } else {  // c4
        C4Params P;
        P.c2 = need(a.c2, "--c2", k);
        P.q2_content = a.q2_content.value_or(1);
        P.p = need(a.p, "--p", k);
        P.p_prime = need(a.p_prime, "--p-prime", k);
        P.q1 = a.q1.value_or(1);
        P.m2 = a.m2.value_or(1);
        P.M = need(a.modulus, "--modulus", k);
        P.h = a.h.value_or(1);
        P.n = need(a.n, "--n", k);
        P.r1 = need(a.r_prime, "--r-prime", k);
        P.l = need(a.l, "--l", k);
        P.l_prime = need(a.l_prime, "--l-prime", k);
        params = {{"c2", P.c2}, {"q2_content", P.q2_content}, {"p", P.p}, {"p_prime", P.p_prime}, {"q1", P.q1},
                  {"m2", P.m2}, {"modulus", P.M}, {"h", P.h}, {"n", P.n}, {"r_prime", P.r1}, {"l", P.l},
                  {"l_prime", P.l_prime}};
        v = c4_correlation(P);
    }
    Output out;
    if (mode == Mode::Json) {
        Json j{{"re", v.value.real()}, {"im", v.value.imag()}, {"terms", v.terms}, {"est_error", v.est_error}};
        if (integer) j["value"] = *integer;
        j["sum"] = k;
        j["params"] = params;
        out.text = j.dump() + "\n";
    } else if (mode == Mode::Csv) {
        out.text = k + "," + csv_field(params.dump()) + "," + num(v.value.real()) + "," + num(v.value.imag()) + "," +
                   std::to_string(v.terms) + "," + num(v.est_error) + "\n";
    } else {
        std::ostringstream os;
        os << k << " " << params.dump() << "\n";
        if (integer) os << "value = " << *integer << "\n";
        os << "re = " << num(v.value.real()) << "\nim = " << num(v.value.imag()) << "\nterms = " << v.terms
           << "\nest_error = " << num(v.est_error) << "\n";
        out.text = os.str();
    }
    return out;
}

// ---- verify ----

Output run_verify(const std::string& suite, const SuiteOptions& opt, Mode mode, bool timing) {
    const ScanReport rep = run_suite(suite, opt);
    Output out;
    out.code = rep.passed ? kOk : kSuiteFailed;
    out.ledger_row = rep.csv_row();
    if (mode == Mode::Json) {
        out.text = rep.dump(timing) + "\n";
    } else if (mode == Mode::Csv) {
        out.text = rep.csv_row() + "\n";
    } else {
        std::ostringstream os;
        os << rep.suite << ": " << (rep.passed ? "PASS" : "FAIL") << " (cases " << rep.cases << ", skipped "
           << rep.skipped << ", max_deviation " << num(rep.max_deviation) << ", tolerance " << num(rep.tolerance)
           << ")\n";
        os << "worst_witness " << rep.worst_witness.dump() << "\n";
        if (timing) os << "runtime_ms " << rep.runtime_ms << "\n";
        out.text = os.str();
    }
    return out;
}

// ---- optimize ----

std::string show(const Rational& q, bool exact) {
    return exact ? to_string(q) : num(q.convert_to<double>());
}

std::string affine(const Rational& c, const std::vector<std::pair<Rational, const char*>>& terms, bool exact) {
    std::string s = show(c, exact);
    for (const auto& [coef, var] : terms) {
        if (coef == 0) continue;
        s += coef < 0 ? " - " : " + ";
        s += show(abs(coef), exact) + "*" + var;
    }
    return s;
}

void print_result(std::ostream& os, const BoundProblem& prob, const OptimizationResult& r, bool exact) {
    os << "theta = " << show(r.point.theta, exact) << "\n";
    os << "x_P = " << show(r.point.xP, exact) << "\n";
    os << "x_L = " << show(r.point.xL, exact) << "\n";
    os << "exponent = " << show(r.value, exact) << "\n";
    os << "active =";
    for (auto i : r.active_terms) os << " " << prob.forms[i].label;
    os << "\ncertificate =";
    for (const auto& m : r.certificate) os << " " << m.row << ":" << show(m.value, exact);
    os << "\nstrict constraints hold = " << (r.strict_constraints_hold ? "yes" : "no") << "\n";
}

Json result_json(const BoundProblem& prob, const OptimizationResult& r, bool exact) {
    auto val = [&](const Rational& q) { return exact ? Json(to_string(q)) : Json(q.convert_to<double>()); };
    Json active = Json::array(), cert = Json::object();
    for (auto i : r.active_terms) active.push_back(prob.forms[i].label);
    for (const auto& m : r.certificate) cert[m.row] = val(m.value);
    return {{"theta", val(r.point.theta)}, {"xP", val(r.point.xP)},   {"xL", val(r.point.xL)},
            {"exponent", val(r.value)},    {"active", active},        {"certificate", cert},
            {"strict_constraints_hold", r.strict_constraints_hold}};
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read problem file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Output run_optimize(const std::string& problem_file, bool exact, bool staged, Mode mode) {
    const bool paper = problem_file.empty();
    const BoundProblem prob = paper ? paper_bound_problem(true) : parse_problem(read_text(problem_file));
    const OptimizationResult r = minimize_max(prob);
    std::optional<StagedTrace> tr;
    if (staged) tr = staged_elimination(prob);
    std::optional<OptimizationResult> free;
    const BoundProblem free_prob = paper_bound_problem(false);
    if (paper) free = minimize_max(free_prob);
    auto post_hoc = [](const OptimizationResult& x) { return 4 * x.point.theta + x.point.xL <= x.point.xP; };

    Output out;
    if (mode == Mode::Json) {
        Json j{{"problem", paper ? "paper" : problem_file}, {"result", result_json(prob, r, exact)}};
        if (tr) {
            Json dropped = Json::array();
            for (auto i : tr->dropped) dropped.push_back(prob.forms[i].label);
            j["staged"] = {{"dropped", dropped},
                           {"result", result_json(prob, tr->result, exact)},
                           {"agrees", tr->result.point == r.point && tr->result.value == r.value}};
        }
        if (free) {
            j["without_post_hoc"] = result_json(free_prob, *free, exact);
            j["without_post_hoc"]["relation_4theta_plus_xL_le_xP"] = post_hoc(*free);
        }
        out.text = j.dump() + "\n";
        return out;
    }
    std::ostringstream os;
    os << "problem = " << (paper ? "paper (with 4theta+L<=P)" : problem_file) << "\n";
    print_result(os, prob, r, exact);
    if (tr) {
        os << "staged dropped =";
        for (auto i : tr->dropped) os << " " << prob.forms[i].label;
        os << "\nstaged x_L = "
           << affine(tr->xL_choice.constant, {{tr->xL_choice.coeff_xP, "x_P"}, {tr->xL_choice.coeff_theta, "theta"}}, exact)
           << "\nstaged " << tr->after_xL.label << " = "
           << affine(tr->after_xL.constant, {{tr->after_xL.coeff_xP, "x_P"}, {tr->after_xL.coeff_theta, "theta"}}, exact)
           << "\nstaged x_P = " << affine(tr->xP_choice.constant, {{tr->xP_choice.coeff_theta, "theta"}}, exact)
           << "\nstaged " << tr->after_xP.label << " = "
           << affine(tr->after_xP.constant, {{tr->after_xP.coeff_theta, "theta"}}, exact) << "\nstaged theta from "
           << prob.forms[tr->theta_partner].label << "\nstaged agrees with LP = "
           << (tr->result.point == r.point && tr->result.value == r.value ? "yes" : "no") << "\n";
    }
    if (free) {
        os << "without 4theta+L<=P: exponent = " << show(free->value, exact) << ", theta = " << show(free->point.theta, exact)
           << ", relation holds = " << (post_hoc(*free) ? "yes" : "no") << "\n";
    }
    out.text = os.str();
    return out;
}

// ---- bessel / integral ----

Output run_bessel(int nu, double x, Mode mode) {
    const double v = bessel_j(nu, x);
    Output out;
    if (mode == Mode::Json)
        out.text = Json{{"nu", nu}, {"x", x}, {"value", v}}.dump() + "\n";
    else if (mode == Mode::Csv)
        out.text = std::to_string(nu) + "," + num(x) + "," + num(v) + "\n";
    else
        out.text = "J_" + std::to_string(nu) + "(" + num(x) + ") = " + num(v) + "\n";
    return out;
}

struct IntegralArgs {
    std::string preset = "toy";
    double t = 1.0;
    std::optional<i64> c, n, p, l, modulus, m;
    std::optional<int> k;
    std::string window = "plateau";
    double tol = 1e-12;
};

Output run_integral(const IntegralArgs& a, Mode mode) {
    ToyScale toy;
    if (a.k) toy.k = *a.k;
    if (a.m) toy.m = *a.m;
    IntegralParams ip = toy.at_multiplier(a.t);
    if (a.c) ip.c = *a.c;
    if (a.n) ip.n = *a.n;
    if (a.p) ip.p = *a.p;
    if (a.l) ip.l = *a.l;
    if (a.modulus) ip.M = *a.modulus;
    const WindowFunction V = a.window == "bump" ? WindowFunction::bump() : toy.window();
    const IntegralResult r = integral_I(ip, V, a.tol);
    Output out;
    const Json params{{"N", ip.N}, {"n", ip.n}, {"p", ip.p}, {"l", ip.l}, {"c", ip.c},
                      {"M", ip.M}, {"m", ip.m}, {"k", ip.k}, {"window", a.window}};
    if (mode == Mode::Json) {
        out.text = Json{{"re", r.value.real()}, {"im", r.value.imag()}, {"abs", std::abs(r.value)},
                        {"error_estimate", r.error_estimate}, {"panels", r.panels}, {"cutoff", toy.cutoff()},
                        {"params", params}}
                       .dump() +
                   "\n";
    } else if (mode == Mode::Csv) {
        out.text = csv_field(params.dump()) + "," + num(r.value.real()) + "," + num(r.value.imag()) + "," +
                   num(r.error_estimate) + "," + std::to_string(r.panels) + "\n";
    } else {
        std::ostringstream os;
        os << "integral " << params.dump() << "\nre = " << num(r.value.real()) << "\nim = " << num(r.value.imag())
           << "\nabs = " << num(std::abs(r.value)) << "\nerror_estimate = " << num(r.error_estimate)
           << "\npanels = " << r.panels << "\ncutoff = " << num(toy.cutoff()) << "\n";
        out.text = os.str();
    }
    return out;
}

// Flags given on the command line, for the cache key.
void collect(const CLI::App* app, std::map<std::string, std::string>& flags) {
    for (const CLI::Option* o : app->get_options()) {
        if (o->count() == 0) continue;
        const std::string name = o->get_name();
        if (name == "--help" || name == "--no-cache" || name == "--workers" || name == "--cache-dir" ||
            name == "--config")
            continue;
        std::string v;
        for (const auto& r : o->results()) v += r + "\x1f";
        flags[name] = v;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential sums, character sums and exponent optimisation checks"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");
    app.fallthrough();

    std::string config_path, cache_dir;
    std::optional<unsigned> workers;
    std::optional<double> tol_scale;
    std::optional<std::uint64_t> seed;
    bool no_cache = false, json = false, csv = false, timing = false;
    app.add_option("--config", config_path, "config file of key = value lines");
    app.add_option("--cache-dir", cache_dir, "cache directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tolerance-scale", tol_scale, "multiplier on suite tolerances")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for randomized grids");
    app.add_flag("--no-cache", no_cache, "neither read nor write the cache");
    auto* json_flag = app.add_flag("--json", json, "single JSON document on stdout");
    app.add_flag("--csv", csv, "CSV rows on stdout")->excludes(json_flag);
    app.add_flag("--timing", timing, "include runtime_ms in reports");

    SumArgs sa;
    auto* sum = app.add_subcommand("sum", "evaluate one exponential or character sum");
    sum->add_option("kind", sa.kind)
        ->required()
        ->check(CLI::IsMember({"kloosterman", "twisted", "gauss", "ramanujan", "dsum", "c3", "c4"}));
    sum->add_option("--m", sa.m);
    sum->add_option("--n", sa.n);
    sum->add_option("--c", sa.c);
    sum->add_option("--q", sa.q);
    sum->add_option("--u", sa.u);
    sum->add_option("--v", sa.v);
    sum->add_option("--modulus", sa.modulus, "prime modulus of the character (M for c4)");
    sum->add_option("--chi-index", sa.chi_index);
    sum->add_option("--psi-index", sa.psi_index);
    sum->add_option("--c2", sa.c2);
    sum->add_option("--q2-content", sa.q2_content);
    sum->add_option("--p", sa.p);
    sum->add_option("--p-prime", sa.p_prime);
    sum->add_option("--q1", sa.q1);
    sum->add_option("--m2", sa.m2);
    sum->add_option("--h", sa.h);
    sum->add_option("--r-prime", sa.r_prime);
    sum->add_option("--l", sa.l);
    sum->add_option("--l-prime", sa.l_prime);
    sum->add_option("--route", sa.route, "c3 evaluation: raw, pair or closed")
        ->check(CLI::IsMember({"raw", "pair", "closed"}));

    std::string suite, preset = "default";
    std::int64_t budget = 0, trials = 0;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite)->required()->check(CLI::IsMember(suite_names()));
    verify->add_option("--grid-preset", preset)->check(CLI::IsMember({"default", "smoke"}));
    verify->add_option("--budget", budget, "maximum number of cases")->check(CLI::NonNegativeNumber);
    verify->add_option("--trials", trials, "reciprocity trial count")->check(CLI::PositiveNumber);

    std::string problem_file;
    bool paper = true, exact = false, staged = false;
    auto* optimize = app.add_subcommand("optimize", "solve the exponent min-max problem");
    auto* paper_flag = optimize->add_flag("--paper", paper, "the six-term bound (default)");
    optimize->add_option("--problem", problem_file, "problem description file")->excludes(paper_flag);
    optimize->add_flag("--exact", exact, "print exact rationals");
    optimize->add_flag("--staged", staged, "also run the pairwise elimination");

    int nu = 0;
    double x = 0.0;
    auto* bessel = app.add_subcommand("bessel", "evaluate J_nu(x)");
    bessel->add_option("--nu", nu)->required();
    bessel->add_option("--x", x)->required();

    IntegralArgs ia;
    auto* integral = app.add_subcommand("integral", "evaluate the Bessel integral at toy scale");
    integral->add_option("--preset", ia.preset)->required()->check(CLI::IsMember({"toy"}));
    integral->add_option("--t", ia.t, "c = ceil(t * cutoff)")->check(CLI::PositiveNumber);
    integral->add_option("--c", ia.c);
    integral->add_option("--n", ia.n);
    integral->add_option("--p", ia.p);
    integral->add_option("--l", ia.l);
    integral->add_option("--modulus", ia.modulus);
    integral->add_option("--m", ia.m);
    integral->add_option("--k", ia.k);
    integral->add_option("--window", ia.window)->check(CLI::IsMember({"plateau", "bump"}));
    integral->add_option("--tol", ia.tol)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        dc::CliConfig cfg = dc::default_config();
        if (!config_path.empty()) cfg = dc::load_config_file(config_path, cfg);
        dc::apply_environment(cfg);
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (workers) cfg.workers = *workers;
        if (tol_scale) cfg.default_tolerance_scale = *tol_scale;
        if (seed) cfg.seed = *seed;

        const Mode mode = json ? Mode::Json : csv ? Mode::Csv : Mode::Plain;
        CLI::App* sub = app.get_subcommands().front();
        if (sub == optimize && mode == Mode::Csv) throw UsageError("optimize has no CSV output");

        std::map<std::string, std::string> flags;
        collect(&app, flags);
        collect(sub, flags);
        flags["seed"] = std::to_string(cfg.seed);
        flags["tolerance_scale"] = num(cfg.default_tolerance_scale);
        const std::string key = dc::cache_key(sub->get_name(), flags);
        const dc::Cache cache(cfg.cache_dir);

        if (!no_cache) {
            if (auto hit = cache.lookup(key)) {
                const auto nl = hit->find('\n');
                std::cout << hit->substr(nl + 1);
                return std::stoi(hit->substr(0, nl));
            }
        }

        Output out;
        if (sub == sum) {
            out = run_sum(sa, mode);
        } else if (sub == verify) {
            SuiteOptions opt;
            opt.preset = preset;
            opt.seed = cfg.seed;
            opt.trials = trials;
            opt.budget = budget;
            opt.workers = cfg.workers;
            opt.tolerance_scale = cfg.default_tolerance_scale;
            out = run_verify(suite, opt, mode, timing);
        } else if (sub == optimize) {
            out = run_optimize(problem_file, exact, staged, mode);
        } else if (sub == bessel) {
            out = run_bessel(nu, x, mode);
        } else {
            out = run_integral(ia, mode);
        }

        if (!no_cache) {
            // Timing output is not reproducible, so it is never cached.
            if (!timing) cache.store(key, std::to_string(out.code) + "\n" + out.text);
            if (!out.ledger_row.empty()) cache.append_ledger(ScanReport::csv_header(), out.ledger_row);
        }
        std::cout << out.text;
        return out.code;
    } catch (const UsageError& e) {
        std::cerr << "deltasum: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "deltasum: " << e.what() << "\n";
        return e.kind() == ErrorKind::ParseError ? kUsage : kComputation;
    } catch (const std::exception& e) {
        std::cerr << "deltasum: " << e.what() << "\n";
        return kComputation;
    }
}
