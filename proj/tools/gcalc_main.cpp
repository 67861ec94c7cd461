// gcalc: command-line front end for the generalized-number library.
//
//   gcalc <verb> [args] [--depth K] [--mollifier-order q] [--format json|csv]
//                [--verbose]
//
// Verbs: eval, embed, diff, pair, fixpoint, dsa, member, support,
// spec-version. Reads batch scripts from stdin when invoked as `gcalc -`
// (one command per line). JSON output is deterministic: insertion-ordered
// keys, floats at 17 significant digits. Exit codes: 0 ok, 1 parse error,
// 2 domain/library error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcalc/hyper.hpp"
#include "gcalc/pairing.hpp"
#include "gcalc/parse.hpp"
#include "gcalc/report.hpp"
#include "gcalc/sharp.hpp"
#include "gcalc/support.hpp"

namespace {

using namespace gcalc;

constexpr const char* spec_version = "1.0";

// --- config assembly: flag > GCALC_* environment > default -------------------

std::optional<std::string> env_value(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

Config config_from_env() {
    Config cfg;
    if (auto v = env_value("GCALC_LATTICE_DEPTH")) cfg.lattice_depth = std::stoi(*v);
    if (auto v = env_value("GCALC_WINDOW_FRACTION")) cfg.window_fraction = std::stod(*v);
    if (auto v = env_value("GCALC_MOLLIFIER_ORDER")) cfg.mollifier_order = std::stoi(*v);
    if (auto v = env_value("GCALC_QUADRATURE_TOL")) cfg.quadrature_tol = std::stod(*v);
    if (auto v = env_value("GCALC_VALUATION_TOL")) cfg.valuation_tol = std::stod(*v);
    if (auto v = env_value("GCALC_TERM_CAP")) cfg.term_cap = std::stoi(*v);
    if (auto v = env_value("GCALC_ORDER_WINDOW")) cfg.order_window = QQ(std::stoi(*v));
    return cfg;
}

// --- region literals: box(lo...,hi...) | ball(center...,radius) --------------

Region parse_region(const std::string& text) {
    const auto open = text.find('(');
    if (open == std::string::npos || text.empty() || text.back() != ')')
        throw Error(err_bad_argument, "region must be box(lo...,hi...) or ball(center...,radius)");
    const std::string head = text.substr(0, open);
    std::vector<double> nums;
    std::string body = text.substr(open + 1, text.size() - open - 2);
    std::istringstream in(body);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            nums.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw Error(err_bad_argument, "malformed coordinate '" + tok + "' in region literal");
        }
    }
    if (head == "box") {
        if (nums.empty() || nums.size() % 2 != 0)
            throw Error(err_bad_argument, "box needs an even coordinate list: lo...,hi...");
        const std::size_t d = nums.size() / 2;
        return Region::box({nums.begin(), nums.begin() + static_cast<long>(d)},
                           {nums.begin() + static_cast<long>(d), nums.end()});
    }
    if (head == "ball") {
        if (nums.size() < 2)
            throw Error(err_bad_argument, "ball needs center coordinates and a radius");
        const double radius = nums.back();
        nums.pop_back();
        return Region::ball(std::move(nums), radius);
    }
    throw Error(err_bad_argument, "unknown region kind '" + head + "'");
}

Json json_of_region(const Region& r) {
    Json j = Json::object();
    if (r.kind == Region::Kind::Box) {
        j.set("kind", Json::str("box"));
        Json lo = Json::array(), hi = Json::array();
        for (double v : r.lo) lo.push(Json::number(v));
        for (double v : r.hi) hi.push(Json::number(v));
        j.set("lo", std::move(lo));
        j.set("hi", std::move(hi));
    } else {
        j.set("kind", Json::str("ball"));
        Json c = Json::array();
        for (double v : r.center) c.push(Json::number(v));
        j.set("center", std::move(c));
        j.set("radius", Json::number(r.radius));
    }
    return j;
}

// --- function embedding shared by embed/diff/pair/dsa ------------------------

bool mentions_distribution(const ExprPtr& e) {
    for (ExprKind k : {ExprKind::Delta, ExprKind::Heaviside, ExprKind::SignFn, ExprKind::AbsFn})
        if (contains_kind(e, k)) return true;
    return false;
}

GeneralizedFunction embed_any(const ExprPtr& e, const Region& dom, const Config& cfg) {
    if (mentions_distribution(e))
        return GeneralizedFunction::embed_distribution(e, cfg.mollifier_order, dom, cfg);
    return GeneralizedFunction::from_expression(e, dom, cfg);
}

Json json_of_function(const GeneralizedFunction& f) {
    Json j = Json::object();
    j.set("expression", Json::str(print_expr(f.expression())));
    if (f.embedding_order()) j.set("order", Json::integer(*f.embedding_order()));
    if (f.catalog()) {
        const CatalogTag& t = *f.catalog();
        const char* name = t.kind == CatalogTag::Kind::Delta        ? "delta"
                           : t.kind == CatalogTag::Kind::Heaviside  ? "heaviside"
                           : t.kind == CatalogTag::Kind::Sign       ? "sign"
                                                                    : "abs";
        j.set("catalog",
              Json::object().set("kind", Json::str(name)).set("order", Json::integer(t.order)));
    }
    Json growth = Json::array();
    for (double g : f.growth_exponents()) growth.push(Json::number(g));
    j.set("growth", std::move(growth));
    j.set("domain", json_of_region(f.domain()));
    return j;
}

// --- command runner -----------------------------------------------------------

struct Outcome {
    int exit_code = 0;
    std::string text;  // full stdout payload (JSON line or CSV block)
};

struct Options {
    Config cfg;
    std::string format = "json";
    bool verbose = false;
};

Json envelope(const std::string& verb, const Options& opt) {
    Json j = Json::object();
    j.set("verb", Json::str(verb));
    j.set("spec-version", Json::str(spec_version));
    j.set("config", json_of(opt.cfg));
    return j;
}

void attach_warnings(Json& env, const std::vector<std::string>& warnings) {
    Json w = Json::array();
    for (const auto& s : warnings) w.push(Json::str(s));
    env.set("warnings", std::move(w));
}

std::vector<CsvRow> number_rows(const GeneralizedNumber& n, const Config& cfg) {
    std::vector<CsvRow> rows;
    for (int k = 1; k <= cfg.lattice_depth; ++k)
        rows.push_back({k, epsilon_at(k), false, 0.0, n.sample(k)});
    return rows;
}

Outcome run_eval(const std::string& source, const Options& opt) {
    const GeneralizedNumber n = evaluate_number(parse_expr(source), opt.cfg);
    if (opt.format == "csv") {
        std::ostringstream os;
        write_csv(os, number_rows(n, opt.cfg));
        return {0, os.str()};
    }
    Json env = envelope("eval", opt);
    env.set("result", json_of(n));
    env.set("valuation", json_of(valuation(n)));
    env.set("norm", Json::number(norm(n)));
    if (opt.verbose) {
        Json samples = Json::array();
        for (const CsvRow& r : number_rows(n, opt.cfg))
            samples.push(Json::object()
                             .set("k", Json::integer(r.k))
                             .set("epsilon", Json::number(r.epsilon))
                             .set("value", Json::number(r.value)));
        env.set("samples", std::move(samples));
    }
    attach_warnings(env, n.warnings());
    return {0, env.dump() + "\n"};
}

Outcome run_embed(const std::string& source, const Region& dom, const Options& opt) {
    const GeneralizedFunction f = embed_any(parse_expr(source), dom, opt.cfg);
    if (opt.format == "csv") {
        // Function dump: 17 grid points per lattice index on the first axis.
        std::vector<CsvRow> rows;
        const Region& d = f.domain();
        const double lo = d.kind == Region::Kind::Box ? d.lo[0] : d.center[0] - d.radius;
        const double hi = d.kind == Region::Kind::Box ? d.hi[0] : d.center[0] + d.radius;
        for (int k = 4; k <= opt.cfg.lattice_depth; k += 4)
            for (int i = 0; i <= 16; ++i) {
                const double x = lo + (hi - lo) * i / 16.0;
                rows.push_back({k, epsilon_at(k), true, x,
                                point_eval(f.expression(), x, 0.0, k, opt.cfg)});
            }
        std::ostringstream os;
        write_csv(os, rows);
        return {0, os.str()};
    }
    Json env = envelope("embed", opt);
    env.set("result", json_of_function(f));
    attach_warnings(env, {});
    return {0, env.dump() + "\n"};
}

Outcome run_diff(const std::string& source, const Region& dom, int axis, const Options& opt) {
    const GeneralizedFunction f = embed_any(parse_expr(source), dom, opt.cfg);
    const GeneralizedFunction df = sharp_derivative(f, axis, opt.cfg);
    Json env = envelope("diff", opt);
    env.set("result", json_of_function(df));
    attach_warnings(env, {});
    return {0, env.dump() + "\n"};
}

Outcome run_pair(const std::string& dist_src, const std::string& test_src, double a, double b,
                 const Options& opt) {
    const GeneralizedFunction f =
        embed_any(parse_expr(dist_src), Region::interval(a, b), opt.cfg);
    const PairingResult p = pairing(f, parse_expr(test_src), a, b, opt.cfg);
    if (opt.format == "csv") {
        std::ostringstream os;
        write_csv(os, number_rows(p.value, opt.cfg));
        return {0, os.str()};
    }
    Json env = envelope("pair", opt);
    Json res = Json::object();
    res.set("value", Json::number(p.value.sample(opt.cfg.lattice_depth)));
    res.set("classical", Json::number(p.classical));
    res.set("catalog", Json::boolean(p.catalog));
    res.set("residual", json_of(p.residual));
    res.set("residual-valuation", json_of(residual_valuation(p, opt.cfg)));
    env.set("result", std::move(res));
    attach_warnings(env, p.value.warnings());
    return {0, env.dump() + "\n"};
}

Outcome run_fixpoint(const std::string& map_src, double lambda, const std::string& t_text,
                     double seed, const Options& opt) {
    const ExprPtr map = parse_expr(map_src);
    {
        bool has_x = false, has_t = false;
        collect_axes(map, has_x, has_t);
        if (has_t) throw Error(err_bad_argument, "fixpoint map must be written in x");
    }
    const QQ t = parse_rational(t_text);
    const auto T = [&](double x, int k) { return point_eval(map, x, 0.0, k, opt.cfg); };
    const FixedPointResult r = fixed_point_solve(T, lambda, t, seed, opt.cfg);
    if (opt.format == "csv") {
        std::ostringstream os;
        write_csv(os, number_rows(r.point, opt.cfg));
        return {0, os.str()};
    }
    Json env = envelope("fixpoint", opt);
    Json res = Json::object();
    res.set("point", json_of(r.point));
    res.set("shadow", Json::number(r.point.sample(opt.cfg.lattice_depth)));
    const IndexFormula& w = r.witness.parts()[0].second;
    res.set("witness_n0",
            Json::object().set("a", Json::str(to_string(w.a))).set("b", Json::str(to_string(w.b))));
    res.set("lambda", Json::number(r.lambda));
    res.set("t", Json::str(to_string(r.t)));
    env.set("result", std::move(res));
    attach_warnings(env, r.point.warnings());
    return {0, env.dump() + "\n"};
}

Outcome run_dsa(const std::string& source, const Region& dom, int level, int order,
                const std::string& r_text, const Options& opt) {
    const GeneralizedFunction f = embed_any(parse_expr(source), dom, opt.cfg);
    const DsaReport rep = dsa_check(f, level, order, parse_rational(r_text), opt.cfg);
    Json env = envelope("dsa", opt);
    Json res = Json::object();
    const char* verdict = rep.verdict == DsaReport::Verdict::Pass       ? "PASS"
                          : rep.verdict == DsaReport::Verdict::Vacuous  ? "VACUOUS"
                                                                        : "VIOLATION";
    res.set("verdict", Json::str(verdict));
    if (rep.verdict == DsaReport::Verdict::Violation)
        res.set("offending", Json::integer(rep.offending));
    res.set("threshold", Json::number(rep.threshold));
    Json profile = Json::array();
    for (std::size_t j = 0; j < rep.profile.valuation.size(); ++j)
        profile.push(Json::object()
                         .set("order", Json::integer(static_cast<long long>(j)))
                         .set("valuation", Json::number(rep.profile.valuation[j]))
                         .set("exact", Json::boolean(rep.profile.exact[j])));
    res.set("profile", std::move(profile));
    env.set("result", std::move(res));
    attach_warnings(env, {});
    return {0, env.dump() + "\n"};
}

Outcome run_member(const std::string& point_src, const std::string& region_text,
                   const Options& opt) {
    const GeneralizedNumber p = evaluate_number(parse_expr(point_src), opt.cfg);
    const Region region = parse_region(region_text);
    const SetNet net = SetNet::constant(region);
    const StrongVerdict v = strong_member({p}, net, opt.cfg);
    Json env = envelope("member", opt);
    Json res = Json::object();
    res.set("member", Json::boolean(v.member));
    res.set("exact", Json::boolean(v.exact));
    res.set("distance-valuation", json_of(valuation(v.distance)));
    env.set("result", std::move(res));
    attach_warnings(env, v.distance.warnings());
    return {0, env.dump() + "\n"};
}

Outcome run_support(const std::string& source, const Options& opt) {
    const GeneralizedNumber n = evaluate_number(parse_expr(source), opt.cfg);
    const SupportSet s = support(n, opt.cfg);
    Json env = envelope("support", opt);
    env.set("result", json_of(s));
    attach_warnings(env, n.warnings());
    return {0, env.dump() + "\n"};
}

Outcome run_command(const std::vector<std::string>& args);

Outcome run_batch(std::istream& in) {
    Outcome out;
    std::string line;
    while (std::getline(in, line)) {
        // shell-like tokenization: spaces split, quotes group
        std::vector<std::string> args;
        std::string cur;
        bool in_quote = false;
        char quote = '"';
        bool has_tok = false;
        for (char c : line) {
            if (in_quote) {
                if (c == quote) {
                    in_quote = false;
                } else {
                    cur += c;
                }
            } else if (c == '"' || c == '\'') {
                in_quote = true;
                quote = c;
                has_tok = true;
            } else if (c == ' ' || c == '\t') {
                if (has_tok) args.push_back(cur);
                cur.clear();
                has_tok = false;
            } else {
                cur += c;
                has_tok = true;
            }
        }
        if (has_tok) args.push_back(cur);
        if (args.empty() || args[0].starts_with('#')) continue;
        const Outcome one = run_command(args);
        out.text += one.text;
        if (out.exit_code == 0) out.exit_code = one.exit_code;
    }
    return out;
}

Outcome error_outcome(const std::string& verb, const Error& e, const Options& opt) {
    const auto* pe = dynamic_cast<const ParseError*>(&e);
    Json env = envelope(verb.empty() ? "unknown" : verb, opt);
    Json err = Json::object();
    err.set("code", Json::str(e.code()));
    err.set("message", Json::str(e.what()));
    if (pe != nullptr) {
        err.set("line", Json::integer(pe->line()));
        err.set("column", Json::integer(pe->column()));
    }
    env.set("error", std::move(err));
    return {pe != nullptr ? 1 : 2, env.dump() + "\n"};
}

Outcome run_command(const std::vector<std::string>& args) {
    CLI::App app{"generalized-number calculator"};
    app.require_subcommand(1);

    Options opt;
    opt.cfg = config_from_env();
    int depth = -1, mollifier_order = -1, term_cap = -1, order_window = -1;
    double window_fraction = -1.0, quadrature_tol = -1.0, valuation_tol = -1.0;
    for (CLI::App* a : {&app}) {
        a->add_option("--depth", depth, "lattice depth K");
        a->add_option("--mollifier-order", mollifier_order, "mollifier order q");
        a->add_option("--window-fraction", window_fraction, "regression window fraction");
        a->add_option("--quadrature-tol", quadrature_tol, "quadrature tolerance");
        a->add_option("--valuation-tol", valuation_tol, "valuation tolerance");
        a->add_option("--term-cap", term_cap, "expansion term cap");
        a->add_option("--order-window", order_window, "series order window");
        a->add_option("--format", opt.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        a->add_flag("--verbose", opt.verbose, "include lattice samples");
    }
    app.fallthrough();

    std::string expr_arg, second_arg, region_text = "box(-8,8)", t_text = "1";
    std::string axis = "x";
    double a_end = -8.0, b_end = 8.0, lambda = 0.5, seed = 0.0;
    int level = 1, order = 1;
    std::string r_text = "1";

    CLI::App* eval = app.add_subcommand("eval", "evaluate a closed expression");
    eval->add_option("expression", expr_arg)->required();

    CLI::App* embed = app.add_subcommand("embed", "embed an expression as a function");
    embed->add_option("expression", expr_arg)->required();
    embed->add_option("--domain", region_text, "domain region literal");

    CLI::App* diff = app.add_subcommand("diff", "sharp derivative of an embedded function");
    diff->add_option("expression", expr_arg)->required();
    diff->add_option("--domain", region_text, "domain region literal");
    diff->add_option("--axis", axis, "x|t")->check(CLI::IsMember({"x", "t"}));

    CLI::App* pair = app.add_subcommand("pair", "pair a distribution with a test function");
    pair->add_option("distribution", expr_arg)->required();
    pair->add_option("test", second_arg)->required();
    pair->add_option("--from", a_end, "support interval start");
    pair->add_option("--to", b_end, "support interval end");

    CLI::App* fixpoint = app.add_subcommand("fixpoint", "contraction fixed point");
    fixpoint->add_option("map", expr_arg)->required();
    fixpoint->add_option("--lambda", lambda, "contraction factor")->required();
    fixpoint->add_option("--exponent", t_text, "neighborhood exponent t (rational)");
    fixpoint->add_option("--seed", seed, "starting value");

    CLI::App* dsa = app.add_subcommand("dsa", "down-sequencing diagnostic");
    dsa->add_option("expression", expr_arg)->required();
    dsa->add_option("--domain", region_text, "domain region literal");
    dsa->add_option("--level", level, "exhaustion level");
    dsa->add_option("--order", order, "derivative order");
    dsa->add_option("--r", r_text, "threshold exponent r (rational)");

    CLI::App* member = app.add_subcommand("member", "strong membership in an internal set");
    member->add_option("point", expr_arg)->required();
    member->add_option("region", second_arg)->required();

    CLI::App* support_cmd = app.add_subcommand("support", "support of a generalized number");
    support_cmd->add_option("expression", expr_arg)->required();

    app.add_subcommand("spec-version", "print the output schema version");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        Json env = envelope("unknown", opt);
        env.set("error", Json::object()
                             .set("code", Json::str("parse-error"))
                             .set("message", Json::str(e.what())));
        return {1, env.dump() + "\n"};
    }

    if (depth > 0) opt.cfg.lattice_depth = depth;
    if (mollifier_order >= 0) opt.cfg.mollifier_order = mollifier_order;
    if (window_fraction > 0) opt.cfg.window_fraction = window_fraction;
    if (quadrature_tol > 0) opt.cfg.quadrature_tol = quadrature_tol;
    if (valuation_tol > 0) opt.cfg.valuation_tol = valuation_tol;
    if (term_cap > 0) opt.cfg.term_cap = term_cap;
    if (order_window > 0) opt.cfg.order_window = QQ(order_window);

    const std::string verb = app.get_subcommands().empty()
                                 ? std::string("unknown")
                                 : app.get_subcommands()[0]->get_name();
    try {
        opt.cfg.validate();
        if (eval->parsed()) return run_eval(expr_arg, opt);
        if (embed->parsed()) return run_embed(expr_arg, parse_region(region_text), opt);
        if (diff->parsed())
            return run_diff(expr_arg, parse_region(region_text), axis == "t" ? 1 : 0, opt);
        if (pair->parsed()) return run_pair(expr_arg, second_arg, a_end, b_end, opt);
        if (fixpoint->parsed()) return run_fixpoint(expr_arg, lambda, t_text, seed, opt);
        if (dsa->parsed())
            return run_dsa(expr_arg, parse_region(region_text), level, order, r_text, opt);
        if (member->parsed()) return run_member(expr_arg, second_arg, opt);
        if (support_cmd->parsed()) return run_support(expr_arg, opt);
        // spec-version
        Json env = envelope("spec-version", opt);
        env.set("result", Json::str(spec_version));
        attach_warnings(env, {});
        return {0, env.dump() + "\n"};
    } catch (const Error& e) {
        return error_outcome(verb, e, opt);
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    Outcome out;
    if (args.size() == 1 && args[0] == "-") {
        out = run_batch(std::cin);
    } else if (args.empty()) {
        std::cerr << "usage: gcalc <verb> [args] [--depth K] [--mollifier-order q] "
                     "[--format json|csv] [--verbose]; gcalc - for stdin batch\n";
        return 1;
    } else {
        out = run_command(args);
    }
    std::cout << out.text;
    return out.exit_code;
}
