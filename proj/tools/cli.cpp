#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "checks.hpp"
#include "cmtrace/analytic.hpp"
#include "cmtrace/parallel.hpp"
#include "cmtrace/qexp.hpp"
#include "cmtrace/qform.hpp"
#include "cmtrace/thetalift.hpp"

namespace cmtrace::cli {

namespace fs = std::filesystem;

fs::path default_cache_dir()
{
    if (const char* d = std::getenv("CMTRACE_CACHE_DIR"); d && *d)
        return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x)
        return fs::path(x) / "cmtrace";
    if (const char* h = std::getenv("HOME"); h && *h)
        return fs::path(h) / ".cache" / "cmtrace";
    return ".cmtrace-cache";
}

json table_to_json(const table& t)
{
    json j;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j;
}

table table_from_json(const json& j)
{
    table t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows"))
        t.rows.push_back(r);
    return t;
}

namespace {

std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "";
    if (!v.is_string())
        return v.dump();
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace

void emit_table(const table& t, const std::string& format, std::ostream& out)
{
    if (format == "csv") {
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            out << (i ? "," : "") << t.columns[i];
        out << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                out << (i ? "," : "") << csv_cell(r.contains(t.columns[i]) ? r.at(t.columns[i]) : json());
            out << '\n';
        }
        return;
    }
    for (const auto& r : t.rows)
        out << r.dump() << '\n';
}

void emit_report(const json& report, const std::string& format, std::ostream& out)
{
    if (format == "csv") {
        out << "field,value\n";
        const json flat = report.flatten();
        for (const auto& [k, v] : flat.items())
            out << csv_cell(k) << ',' << csv_cell(v) << '\n';
        return;
    }
    out << report.dump(2) << '\n';
}

namespace {

std::string str(const mpq_class& q)
{
    mpq_class c = q;
    c.canonicalize();
    return c.get_str();
}

std::pair<long, long> parse_range(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("range must look like LO:HI, got " + s);
    long lo = 0, hi = 0;
    try {
        std::size_t p1 = 0, p2 = 0;
        lo = std::stol(s.substr(0, colon), &p1);
        hi = std::stol(s.substr(colon + 1), &p2);
        if (p1 != colon || p2 != s.size() - colon - 1)
            throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("range must look like LO:HI, got " + s);
    }
    if (lo < 0 || hi < lo)
        throw std::invalid_argument("range needs 0 <= LO <= HI, got " + s);
    return {lo, hi};
}

bool valid_disc(long D) { return D > 0 && (D % 4 == 0 || D % 4 == 3); }

// --D, else --range, else 3:--dmax
struct disc_selection {
    long D = -1;
    std::string range;
    long dmax = -1;

    void add_to(CLI::App* s)
    {
        s->add_option("--D", D, "a single discriminant (as a positive integer)");
        s->add_option("--range", range, "LO:HI, inclusive");
        s->add_option("--dmax", dmax, "same as --range 3:DMAX");
    }

    std::vector<long> list(bool allow_zero = false) const
    {
        if (D >= 0) {
            if (!(valid_disc(D) || (allow_zero && D == 0)))
                throw std::invalid_argument("D must be positive and = 0 or 3 mod 4");
            return {D};
        }
        long lo = 3, hi = dmax;
        if (!range.empty())
            std::tie(lo, hi) = parse_range(range);
        else if (dmax < 0)
            throw std::invalid_argument("one of --D, --range, --dmax is required");
        std::vector<long> out;
        for (long d = lo; d <= hi; ++d)
            if (valid_disc(d) || (allow_zero && d == 0))
                out.push_back(d);
        return out;
    }

    json echo() const
    {
        if (D >= 0)
            return D;
        if (!range.empty())
            return range;
        return "3:" + std::to_string(dmax);
    }
};

q_series named_series(const std::string& name, long trunc, long level)
{
    auto index = [&](std::size_t from) -> std::optional<long> {
        if (name.size() <= from || !std::all_of(name.begin() + from, name.end(), ::isdigit))
            return std::nullopt;
        return std::stol(name.substr(from));
    };
    if (name == "T")
        return hauptmodul_series(level, trunc);
    if (level != 1)
        throw std::invalid_argument("--level applies to the Hauptmodul T only");
    if (name == "g")
        return g_series(trunc);
    if (name == "eta_quotient_g")
        return eta_quotient_g(trunc);
    if (name == "theta")
        return theta_series(trunc);
    if (name == "eta")
        return eta_series(trunc);
    if (name == "j")
        return j_series(trunc);
    if (name == "J")
        return J_series(trunc);
    if (name == "Delta")
        return delta_series(trunc);
    if (name[0] == 'E' && index(1))
        return eisenstein(static_cast<int>(*index(1)), trunc);
    if (name[0] == 'J' && index(1))
        return faber(*index(1), trunc).series;
    if (name[0] == 'g' && index(1))
        return plus_space_solve(predicted_series({{*index(1), 1}}, 1), trunc);
    throw std::invalid_argument("unknown series name: " + name);
}

// weight 3/2 generating series whose theta lift prediction is known, for f = J or J<m>
q_series lift_series(const std::string& f, long trunc)
{
    if (f == "J")
        return g_series(trunc);
    if (f.size() > 1 && f[0] == 'J' && std::all_of(f.begin() + 1, f.end(), ::isdigit))
        return plus_space_solve(predicted_series({{std::stol(f.substr(1)), 1}}, 1), trunc);
    throw std::invalid_argument("theta: f must be 1, J or J<m>");
}

struct context {
    config cfg;
    std::unique_ptr<result_cache> cache;
    std::ostream* err = nullptr;
    bool hit = false;
};

// Runs compute() unless the cache already has the payload.  Both paths go
// through the same serialization, so a hit is byte-identical to a recompute.
json cached(context& ctx, const std::string& op, const json& inputs, const std::function<json()>& compute)
{
    ctx.hit = false;
    std::string key;
    if (ctx.cache) {
        key = ctx.cache->key_of(op, inputs, ctx.cfg.precision_bits);
        if (auto v = ctx.cache->get(key)) {
            ctx.hit = true;
            return *v;
        }
    }
    json payload = json::parse(compute().dump());
    if (ctx.cache)
        ctx.cache->put(key, payload);
    return payload;
}

json make_report(const std::string& command, const json& inputs, const json& outputs, const std::string& identity,
                 const context& ctx, double seconds)
{
    json r;
    r["command"] = command;
    r["inputs"] = inputs;
    r["outputs"] = outputs;
    r["provenance"] = json{{"identity", identity}, {"version", ctx.cfg.version}, {"cached", ctx.hit}};
    r["timing"] = json{{"seconds", seconds}};
    return r;
}

class stopwatch {
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();

public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }
};

struct threads_guard {
    int prev = get_threads();
    ~threads_guard() { set_threads(prev); }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    threads_guard tg;
    context ctx;
    ctx.err = &err;
    config& cfg = ctx.cfg;
    cfg.threads = get_threads();
    cfg.cache_dir = default_cache_dir();

    CLI::App app{"CM traces of modular functions: class numbers, traces, exact formulas and theta lifts", "cmtrace"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string cache_dir;
    bool no_cache = false;
    app.add_option("--precision", cfg.precision_bits, "working precision in bits (>= 64); default depends on D")
        ->check(CLI::Range(64, 1 << 20));
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", cache_dir, "cache location (default $CMTRACE_CACHE_DIR or ~/.cache/cmtrace)");
    app.add_flag("--no-cache", no_cache, "neither read nor write the cache");
    app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out, "write to this file instead of stdout");

    // reduce
    auto* s_reduce = app.add_subcommand("reduce", "reduce a positive definite form");
    std::vector<long> form;
    s_reduce->add_option("--form", form, "a,b,c")->delimiter(',')->expected(3)->required();

    // forms
    auto* s_forms = app.add_subcommand("forms", "reduced forms (or level-p orbit representatives) of discriminant -D");
    long forms_D = 0, level = 1;
    s_forms->add_option("--D", forms_D, "discriminant")->required();
    s_forms->add_option("--level", level, "p for Gamma_0^*(p) orbits");

    // classnum
    auto* s_classnum = app.add_subcommand("classnum", "Hurwitz class numbers with form counts");
    disc_selection cn_sel;
    cn_sel.add_to(s_classnum);

    // trace
    auto* s_trace = app.add_subcommand("trace", "certified traces t_f(D)");
    disc_selection tr_sel;
    tr_sel.add_to(s_trace);
    std::string fname = "J";
    s_trace->add_option("--f", fname, "1, j, J, J<m>, or T (with --level)");
    s_trace->add_option("--level", level, "p");

    // series
    auto* s_series = app.add_subcommand("series", "exact q-expansion coefficients");
    std::string sname;
    long strunc = 20;
    s_series->add_option("--name", sname, "g, eta_quotient_g, theta, eta, j, J, Delta, E<k>, J<m>, g<m>, T")
        ->required();
    s_series->add_option("--trunc", strunc, "exponent bound (exclusive)");
    s_series->add_option("--level", level, "p for T");

    // verify
    auto* s_verify = app.add_subcommand("verify", "run identity checks (fast, full, or a single check)");
    std::string target = "fast";
    check_options vopt;
    std::vector<std::string> corrupt;
    s_verify->add_option("target", target, "fast, full, or a check name");
    s_verify->add_option("--dmax", vopt.dmax, "range for the zagier check");
    s_verify->add_option("--cmax", vopt.cmax, "c_max for the poincare check");
    s_verify->add_option("--corrupt-g", corrupt, "N:VALUE overrides a coefficient of g (mutation testing)")
        ->group("");

    // exactformula
    auto* s_exact = app.add_subcommand("exactformula", "t_J(D) from the H(D) and S(D,c) sinh series");
    disc_selection ex_sel;
    ex_sel.add_to(s_exact);
    long cmax = 0;
    s_exact->add_option("--cmax", cmax, "largest c (multiple of 4); default 10^4");

    // poincare
    auto* s_poincare = app.add_subcommand("poincare", "Poincare series coefficient from Kloosterman sums");
    int pk = 4;
    long pm = 1, pn = 1;
    s_poincare->add_option("--k", pk, "weight");
    s_poincare->add_option("--m", pm, "pole order");
    s_poincare->add_option("--n", pn, "coefficient index");
    s_poincare->add_option("--cmax", cmax, "largest c; default 10^5");

    // duke
    auto* s_duke = app.add_subcommand("duke", "Duke statistic table");
    long dmin = 3, dmax = 0;
    s_duke->add_option("--dmin", dmin, "smallest D");
    s_duke->add_option("--dmax", dmax, "largest D")->required();

    // theta
    auto* s_theta = app.add_subcommand("theta", "theta integral of f against the prediction");
    std::vector<double> tau{0.0, 1.0};
    std::string tf = "1", component = "avg";
    double tol = -1;
    s_theta->add_option("--tau", tau, "RE,IM")->delimiter(',')->expected(2);
    s_theta->add_option("--f", tf, "1, J or J<m>");
    s_theta->add_option("--component", component, "0, 1 or avg")->check(CLI::IsMember({"0", "1", "avg"}));
    s_theta->add_option("--tol", tol, "absolute tolerance; default 1e-3");

    // avg
    auto* s_avg = app.add_subcommand("avg", "regularized average over the fundamental domain");
    std::string af = "J";
    double atol = 1e-8;
    s_avg->add_option("--f", af, "1, J or J<m>");
    s_avg->add_option("--tol", atol, "quadrature tolerance");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage_error;
    }

    set_threads(cfg.threads);
    if (!cache_dir.empty())
        cfg.cache_dir = cache_dir;
    cfg.use_cache = !no_cache;
    if (cfg.use_cache)
        ctx.cache = std::make_unique<result_cache>(cfg.cache_dir, cfg.version, &err);

    std::ostringstream buf;
    int code = ok;
    stopwatch sw;
    try {
        if (s_reduce->parsed()) {
            quad_form q{form[0], form[1], form[2]};
            if (!q.positive_definite())
                throw std::invalid_argument("reduce: form is not positive definite");
            reduction red = reduce_with_transform(q);
            json outputs{{"D", q.D()},
                         {"reduced", red.form.str()},
                         {"transform", json::array({red.transform.a, red.transform.b, red.transform.c,
                                                    red.transform.d})},
                         {"stabilizer_order", stabilizer_order(red.form)}};
            emit_report(make_report("reduce", json{{"form", q.str()}}, outputs,
                                    "unique reduced representative of the SL2(Z) orbit", ctx, sw.seconds()),
                        cfg.format, buf);
        } else if (s_forms->parsed()) {
            if (!valid_disc(forms_D))
                throw std::invalid_argument("forms: D must be positive and = 0 or 3 mod 4");
            if (level < 1 || (level > 1 && !is_prime(level)))
                throw std::invalid_argument("forms: level must be 1 or a prime");
            json p = cached(ctx, "forms", json{{"D", forms_D}, {"level", level}}, [&] {
                table t{{"D", "p", "a", "b", "c", "stabilizer"}, {}};
                if (level == 1) {
                    for (const auto& q : enumerate_reduced(forms_D))
                        t.rows.push_back(json{{"D", forms_D}, {"p", 1}, {"a", q.a}, {"b", q.b}, {"c", q.c},
                                              {"stabilizer", stabilizer_order(q)}});
                } else {
                    for (const auto& o : level_p_orbits(forms_D, level))
                        t.rows.push_back(json{{"D", forms_D}, {"p", level}, {"a", o.form.a}, {"b", o.form.b},
                                              {"c", o.form.c}, {"stabilizer", o.stabilizer_order}});
                }
                return table_to_json(t);
            });
            emit_table(table_from_json(p), cfg.format, buf);
        } else if (s_classnum->parsed()) {
            const auto Ds = cn_sel.list(true);
            json p = cached(ctx, "classnum", json{{"D", cn_sel.echo()}}, [&] {
                auto rows = parallel_map<json>(Ds.size(), [&](std::size_t i) {
                    const long D = Ds[i];
                    if (D == 0)
                        return json{{"D", 0}, {"H", str(hurwitz(0))}, {"forms", 0}, {"weighted", nullptr},
                                    {"fundamental", false}};
                    mpq_class w = 0;
                    const auto fs = enumerate_reduced(D);
                    for (const auto& q : fs)
                        w += mpq_class(1, stabilizer_order(q));
                    return json{{"D", D}, {"H", str(hurwitz(D))}, {"forms", fs.size()}, {"weighted", str(w)},
                                {"fundamental", is_fundamental(D)}};
                });
                return table_to_json({{"D", "H", "forms", "weighted", "fundamental"}, rows});
            });
            emit_table(table_from_json(p), cfg.format, buf);
        } else if (s_trace->parsed()) {
            const auto Ds = tr_sel.list();
            const modular_function f = make_function(fname, level);
            json p = cached(ctx, "trace", json{{"f", fname}, {"level", level}, {"D", tr_sel.echo()}}, [&] {
                const auto es = trace_table(f, Ds, level, cfg.precision_bits);
                table t{{"D", "f", "trace", "p", "residual", "certified", "bits"}, {}};
                for (const auto& e : es)
                    t.rows.push_back(json{{"D", e.D}, {"f", e.f}, {"trace", str(e.rounded)}, {"p", e.p},
                                          {"residual", e.residual}, {"certified", e.certified},
                                          {"bits", e.bits}});
                return table_to_json(t);
            });
            table t = table_from_json(p);
            emit_table(t, cfg.format, buf);
            for (const auto& r : t.rows)
                if (!r.at("certified").get<bool>()) {
                    err << "error: trace at D = " << r.at("D").get<long>()
                        << " not certified; raise --precision\n";
                    code = precision_failure;
                }
        } else if (s_series->parsed()) {
            if (strunc < 1 || strunc > 5000)
                throw std::invalid_argument("series: --trunc must be in [1, 5000]");
            json p = cached(ctx, "series", json{{"name", sname}, {"trunc", strunc}, {"level", level}}, [&] {
                const q_series s = named_series(sname, strunc, level);
                table t{{"exponent", "coeff"}, {}};
                for (const auto& [k, c] : s.terms())
                    t.rows.push_back(json{{"exponent", str(mpq_class(k, s.denom()))}, {"coeff", str(c)}});
                return table_to_json(t);
            });
            emit_table(table_from_json(p), cfg.format, buf);
        } else if (s_verify->parsed()) {
            for (const auto& c : corrupt) {
                const auto colon = c.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument("--corrupt-g expects N:VALUE");
                vopt.corrupt_g[std::stol(c.substr(0, colon))] = mpq_class(c.substr(colon + 1));
            }
            std::vector<std::string> names;
            if (target == "fast" || target == "full")
                names = suite(target);
            else if (is_check(target))
                names = {target};
            else
                throw std::invalid_argument("verify: unknown target " + target);
            json checks = json::array(), times = json::object();
            bool all = true;
            for (const auto& n : names) {
                check_result r = run_check(n, vopt);
                checks.push_back(json{{"name", r.name}, {"identity", r.identity}, {"pass", r.pass},
                                      {"detail", r.detail}});
                times[n] = r.seconds;
                if (!r.pass) {
                    all = false;
                    err << "verify: FAILED " << r.name << ": " << r.identity << '\n';
                }
            }
            json inputs{{"target", target}, {"dmax", vopt.dmax}, {"cmax", vopt.cmax}};
            if (!vopt.corrupt_g.empty()) {
                json cg = json::object();
                for (const auto& [n, v] : vopt.corrupt_g)
                    cg[std::to_string(n)] = str(v);
                inputs["corrupt_g"] = cg;
            }
            json rep;
            rep["command"] = "verify";
            rep["inputs"] = inputs;
            rep["outputs"] = json{{"checks", checks}};
            rep["provenance"] = json{{"identity", "acceptance identities, one per check"}, {"version", cfg.version}};
            rep["pass"] = all;
            rep["timing"] = json{{"seconds", sw.seconds()}, {"checks", times}};
            emit_report(rep, cfg.format, buf);
            if (!all)
                code = verify_failed;
        } else if (s_exact->parsed()) {
            const long c_max = cmax > 0 ? cmax : cfg.default_c_max_exact;
            const int bits = cfg.precision_bits > 0 ? cfg.precision_bits : 128;
            const auto Ds = ex_sel.list();
            json inputs{{"D", ex_sel.echo()}, {"c_max", c_max}, {"bits", bits}};
            json p = cached(ctx, "exactformula", inputs, [&] {
                auto rows = parallel_map<json>(Ds.size(), [&](std::size_t i) {
                    const long D = Ds[i];
                    const real_hp v = exact_formula_tJ(D, c_max, bits);
                    const trace_entry t = trace(make_function("J"), D);
                    const mp_real diff = v.value - mp_real(t.rounded, v.value.prec());
                    return json{{"D", D},
                                {"value", v.value.to_string(30)},
                                {"nearest", v.value.round_to_integer().get_str()},
                                {"error_bound", v.error_bound},
                                {"trace", str(t.rounded)},
                                {"abs_diff", std::fabs(diff.to_double())}};
                });
                return json{{"rows", rows}};
            });
            emit_report(make_report("exactformula", inputs, p,
                                    "t_J(D) = -24 H(D) + sum over c = 0 mod 4 of S(D,c) sinh(4 pi sqrt(D) / c)", ctx,
                                    sw.seconds()),
                        cfg.format, buf);
        } else if (s_poincare->parsed()) {
            const long c_max = cmax > 0 ? cmax : cfg.default_c_max_poincare;
            json inputs{{"k", pk}, {"m", pm}, {"n", pn}, {"c_max", c_max}};
            json p = cached(ctx, "poincare", inputs, [&] {
                const poincare_result r = poincare_coeff(pk, pm, pn, c_max);
                return json{{"value", r.value},
                            {"nearest", std::to_string(std::llround(r.value))},
                            {"tail_bound", r.tail_bound},
                            {"last_block", r.last_block}};
            });
            emit_report(make_report("poincare", inputs, p,
                                    "2 pi (-1)^{k/2} (n/m)^{(k-1)/2} sum_c K(-m,n,c)/c I_{k-1}(4 pi sqrt(mn)/c)", ctx,
                                    sw.seconds()),
                        cfg.format, buf);
        } else if (s_duke->parsed()) {
            if (dmin < 3 || dmax < dmin)
                throw std::invalid_argument("duke: need 3 <= dmin <= dmax");
            std::vector<long> Ds;
            for (long D = dmin; D <= dmax; ++D)
                if (valid_disc(D))
                    Ds.push_back(D);
            json p = cached(ctx, "duke", json{{"dmin", dmin}, {"dmax", dmax}}, [&] {
                auto rows = parallel_map<json>(Ds.size(), [&](std::size_t i) {
                    const long D = Ds[i];
                    return json{{"D", D}, {"statistic", duke_statistic(D).to_double()}, {"H", str(hurwitz(D))},
                                {"fundamental", is_fundamental(D)}};
                });
                return table_to_json({{"D", "statistic", "H", "fundamental"}, rows});
            });
            emit_table(table_from_json(p), cfg.format, buf);
        } else if (s_theta->parsed()) {
            if (tau.size() != 2 || !(tau[1] > 0))
                throw std::invalid_argument("theta: --tau RE,IM with IM > 0");
            if (tau[1] < 0.5)
                throw std::invalid_argument("theta: IM(tau) >= 0.5 required");
            const double t_tol = tol > 0 ? tol : cfg.default_tol;
            const modular_function f = tf == "1" ? make_function("1") : make_function(tf);
            json inputs{{"tau", tau}, {"f", tf}, {"component", component}, {"tol", t_tol}};
            json p = cached(ctx, "theta", inputs, [&] {
                const cvec t{tau[0], tau[1]};
                const lattice_spec L = level4();
                const rat3 H0{0, 0, 0}, H1{mpq_class(1, 2), 0, 0};
                const long trunc = std::min(600L, static_cast<long>(std::ceil(120.0 / tau[1])) + 40);
                const int comp = component == "avg" ? -1 : std::stoi(component);
                cvec integral, pred;
                long evals = 0;
                double qerr = 0.0, ycut = 0.0;
                for (int h = 0; h < 2; ++h) {
                    if (comp >= 0 && comp != h)
                        continue;
                    integral_result r = theta_integral(L, h ? H1 : H0, t, f, t_tol);
                    integral += r.value;
                    evals += r.evaluations;
                    qerr += r.error;
                    ycut = std::max(ycut, r.Ycut);
                }
                pred = tf == "1" ? eisen_prediction(t, trunc, comp).value.to_complex()
                                 : series_prediction(lift_series(tf, trunc), t, comp).value.to_complex();
                // (I_0 + I_1) / 2 is the full series; a single I_h is twice its part
                if (comp < 0)
                    integral *= 0.5;
                else
                    pred *= 2.0;
                const double abs_err = std::abs(integral - pred);
                return json{{"tau", tau},
                            {"f", tf},
                            {"component", component},
                            {"integral", json::array({integral.real(), integral.imag()})},
                            {"prediction", json::array({pred.real(), pred.imag()})},
                            {"abs_err", abs_err},
                            {"rel_err", abs_err / std::abs(pred)},
                            {"tol", t_tol},
                            {"budget", json{{"evaluations", evals}, {"Ycut", ycut}, {"error_estimate", qerr},
                                            {"series_terms", trunc}}}};
            });
            emit_report(make_report("theta", inputs, p,
                                    "theta integral of f equals the weight 3/2 generating series of its traces", ctx,
                                    sw.seconds()),
                        cfg.format, buf);
        } else if (s_avg->parsed()) {
            const modular_function f = make_function(af);
            json inputs{{"f", af}, {"tol", atol}};
            json p = cached(ctx, "avg", inputs, [&] {
                const average_result r = regularized_average(f, atol);
                return json{{"value", r.value.to_double()},
                            {"error_bound", r.value.error_bound},
                            {"Y", r.Y},
                            {"evaluations", r.evaluations}};
            });
            emit_report(make_report("avg", inputs, p, "(3/pi) times the regularized integral over the fundamental domain",
                                    ctx, sw.seconds()),
                        cfg.format, buf);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const precision_error& e) {
        err << "precision failure: " << e.what() << '\n';
        return precision_failure;
    } catch (const budget_error& e) {
        err << "budget exhausted: " << e.what() << '\n';
        return precision_failure;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return precision_failure;
    }

    if (cfg.out.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
        if (!f) {
            err << "error: cannot open " << cfg.out << '\n';
            return usage_error;
        }
        f << buf.str();
    }
    return code;
}

} // namespace cmtrace::cli
