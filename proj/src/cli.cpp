#include "cra/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cra/analysis.hpp"
#include "cra/errors.hpp"

namespace cra {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// Canonical units have mu = 1 and unit length; time and speed follow.
struct Units {
    double mu = 1.0;
    double length = 1.0;

    double time() const { return std::sqrt(length * length * length / mu); }
    double speed() const { return length / time(); }
    double accel() const { return mu / (length * length); }
    double tau() const { return time() / length; }
};

struct Scenario {
    double r0 = 1.0;
    double v0 = 1.0;
    double gamma0_deg = 0.0;
    double alpha = 0.0;
    Units units;

    InitialState canonical() const
    {
        return {r0 / units.length, v0 / units.speed(), gamma0_deg * std::numbers::pi / 180.0, alpha / units.accel()};
    }
};

struct Output {
    std::string format = "csv";
    std::string path;
};

void add_scenario(CLI::App* cmd, Scenario& sc, bool alpha_required = true)
{
    cmd->add_option("--r0", sc.r0, "Initial radius")->required();
    cmd->add_option("--v0", sc.v0, "Initial speed")->required();
    cmd->add_option("--gamma0-deg", sc.gamma0_deg, "Initial flight-path angle, degrees");
    auto* a = cmd->add_option("--alpha", sc.alpha, "Radial acceleration, positive outward");
    if (alpha_required) {
        a->required();
    }
    cmd->add_option("--mu", sc.units.mu, "Gravitational parameter")->check(CLI::PositiveNumber);
    cmd->add_option("--length-unit", sc.units.length, "Length unit")->check(CLI::PositiveNumber);
}

void add_output(CLI::App* cmd, Output& o)
{
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.path, "Write output to this file");
}

json complex_json(complex z)
{
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json roots_json(const std::array<complex, 3>& r)
{
    json a = json::array();
    for (const auto& z : r) {
        a.push_back(complex_json(z));
    }
    return a;
}

// Scalars as "quantity,value" rows or a flat JSON object.
void emit_record(const json& rec, const Output& o, std::ostream& os)
{
    if (o.format == "json") {
        os << rec.dump(2) << '\n';
        return;
    }
    os << "quantity,value\n";
    for (const auto& [key, val] : rec.items()) {
        if (val.is_number()) {
            os << key << ',' << fmt(val.get<double>()) << '\n';
        } else if (val.is_string()) {
            os << key << ',' << val.get<std::string>() << '\n';
        } else if (val.is_boolean()) {
            os << key << ',' << (val.get<bool>() ? "true" : "false") << '\n';
        } else if (val.is_null()) {
            os << key << ",nan\n";
        } else if (val.is_array()) {
            for (std::size_t i = 0; i < val.size(); ++i) {
                const auto& z = val[i];
                os << key << '_' << i + 1 << "_re," << fmt(z["re"].get<double>()) << '\n';
                os << key << '_' << i + 1 << "_im," << fmt(z["im"].get<double>()) << '\n';
            }
        }
    }
}

json meta_json(const SolutionContext& ctx, const Units& u)
{
    json m;
    m["units"] = {{"mu", u.mu}, {"length", u.length}};
    m["energy"] = ctx.conserved.energy * u.speed() * u.speed();
    m["momentum"] = ctx.conserved.momentum * u.length * u.speed();
    m["motion"] = to_string(ctx.motion.tag);
    m["r_m"] = ctx.r_m * u.length;
    m["v_m"] = ctx.v_m * u.speed();
    m["f_roots"] = roots_json(ctx.f.roots);
    m["g2"] = ctx.lattice.inv.g2;
    m["g3"] = ctx.lattice.inv.g3;
    m["g_roots"] = roots_json(ctx.lattice.roots.e);
    if (ctx.bounded) {
        m["T_tau"] = ctx.T_tau * u.tau();
        m["T_t"] = ctx.T_t * u.time();
        m["theta_period"] = ctx.theta_period;
    } else {
        m["T_tau"] = nullptr;
        m["T_t"] = nullptr;
        m["escape_tau"] = ctx.omega_r * u.tau();
    }
    return m;
}

struct Sink {
    std::ofstream file;
    std::ostream* os;

    Sink(const Output& o, std::ostream& fallback) : os(&fallback)
    {
        if (!o.path.empty()) {
            file.open(o.path);
            if (!file) {
                throw domain_error("cannot open output file " + o.path);
            }
            os = &file;
        }
    }
};

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    }
    return v;
}

void write_samples(const std::vector<PropagatedState>& rows, const SolutionContext& ctx, const Units& u, double t0,
                   const Output& o, std::ostream& os)
{
    if (o.format == "json") {
        json doc;
        doc["meta"] = meta_json(ctx, u);
        doc["samples"] = json::array();
        for (const auto& p : rows) {
            doc["samples"].push_back({{"t", t0 + p.t * u.time()},
                                      {"tau", (p.tau - ctx.tau0) * u.tau()},
                                      {"r", p.r * u.length},
                                      {"theta", p.theta},
                                      {"v", p.v * u.speed()},
                                      {"gamma", p.gamma}});
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "t,tau,r,theta,v,gamma\n";
    for (const auto& p : rows) {
        os << fmt(t0 + p.t * u.time()) << ',' << fmt((p.tau - ctx.tau0) * u.tau()) << ',' << fmt(p.r * u.length)
           << ',' << fmt(p.theta) << ',' << fmt(p.v * u.speed()) << ',' << fmt(p.gamma) << '\n';
    }
}

const char* error_kind(const std::exception& e)
{
    if (dynamic_cast<const degenerate_lattice_error*>(&e)) return "degenerate_lattice";
    if (dynamic_cast<const quadratic_degeneracy_error*>(&e)) return "quadratic_degeneracy";
    if (dynamic_cast<const infeasible_state_error*>(&e)) return "infeasible_state";
    if (dynamic_cast<const pole_error*>(&e)) return "pole";
    if (dynamic_cast<const unbounded_motion_error*>(&e)) return "unbounded_motion";
    if (dynamic_cast<const bracket_error*>(&e)) return "bracket";
    if (dynamic_cast<const no_solution_error*>(&e)) return "no_solution";
    if (dynamic_cast<const domain_error*>(&e)) return "domain";
    if (dynamic_cast<const convergence_error*>(&e)) return "convergence";
    return "internal";
}

void report(std::ostream& err, const char* kind, const std::string& msg)
{
    err << json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Closed-form propagation under constant radial acceleration"};
    app.require_subcommand(1);

    Scenario sc;
    Output o;

    // propagate
    auto* prop = app.add_subcommand("propagate", "Sample the trajectory at uniform time or pseudo-time steps");
    add_scenario(prop, sc);
    add_output(prop, o);
    std::optional<double> t_span;
    std::optional<double> tau_span;
    std::optional<double> n_periods;
    int samples = 101;
    double epoch = 0.0;
    auto* ts = prop->add_option("--t-span", t_span, "Time span from the initial state");
    auto* tus = prop->add_option("--tau-span", tau_span, "Pseudo-time span from the initial state");
    auto* ps = prop->add_option("--periods", n_periods, "Span as a multiple of the radial period");
    ts->excludes(tus)->excludes(ps);
    tus->excludes(ps);
    prop->add_option("--samples", samples, "Number of samples")->check(CLI::PositiveNumber);
    prop->add_option("--t0", epoch, "Epoch added to the time column");

    // classify
    auto* cls = app.add_subcommand("classify", "Boundedness, roots and margin of an initial state");
    add_scenario(cls, sc);
    add_output(cls, o);

    // period
    auto* per = app.add_subcommand("period", "Radial periods; optional Kepler curve or alpha sweep");
    add_scenario(per, sc, false);
    add_output(per, o);
    bool kepler_curve = false;
    bool sweep = false;
    double a_min = -0.2, a_max = 0.2, vp_min = 0.5, vp_max = 1.5;
    int a_steps = 81, vp_steps = 11;
    per->add_flag("--kepler-curve", kepler_curve, "Emit t(tau) over one pseudo-period");
    per->add_flag("--sweep", sweep, "Emit T_tau over an alpha grid for several pericenter speeds");
    per->add_option("--samples", samples, "Kepler-curve samples")->check(CLI::PositiveNumber);
    per->add_option("--alpha-min", a_min, "Sweep: smallest alpha");
    per->add_option("--alpha-max", a_max, "Sweep: largest alpha");
    per->add_option("--alpha-steps", a_steps, "Sweep: alpha grid points")->check(CLI::PositiveNumber);
    per->add_option("--vp-min", vp_min, "Sweep: smallest pericenter speed");
    per->add_option("--vp-max", vp_max, "Sweep: largest pericenter speed");
    per->add_option("--vp-steps", vp_steps, "Sweep: number of pericenter speeds")->check(CLI::PositiveNumber);

    // find-periodic
    auto* fp = app.add_subcommand("find-periodic", "Pericenter speed of a closed orbit with winding M/N");
    double rm = 1.0, fp_alpha = 0.0, v_lo = 0.0, v_hi = 0.0;
    int M = 1, N = 1;
    fp->add_option("--rm", rm, "Pericenter radius")->required();
    fp->add_option("--alpha", fp_alpha, "Radial acceleration")->required();
    fp->add_option("--M", M, "Numerator of the winding ratio")->required();
    fp->add_option("--N", N, "Denominator of the winding ratio")->required()->check(CLI::PositiveNumber);
    fp->add_option("--v-lo", v_lo, "Lower end of the speed bracket")->required();
    fp->add_option("--v-hi", v_hi, "Upper end of the speed bracket")->required();
    fp->add_option("--mu", sc.units.mu, "Gravitational parameter")->check(CLI::PositiveNumber);
    fp->add_option("--length-unit", sc.units.length, "Length unit")->check(CLI::PositiveNumber);
    add_output(fp, o);

    // escape-alpha
    auto* esc = app.add_subcommand("escape-alpha", "Threshold acceleration between bounded and unbounded motion");
    double e_lo = -1.0, e_hi = 1.0;
    add_scenario(esc, sc, false);
    esc->add_option("--alpha-lo", e_lo, "Bracket low end");
    esc->add_option("--alpha-hi", e_hi, "Bracket high end");
    add_output(esc, o);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        report(err, "usage", e.what());
        return exit_domain;
    }

    try {
        const Units& u = sc.units;
        if (*prop) {
            const SolutionContext ctx = build_context(sc.canonical());
            std::vector<PropagatedState> rows;
            double span = 0.0;
            bool in_tau = false;
            if (t_span) {
                span = *t_span / u.time();
            } else if (tau_span) {
                span = *tau_span / u.tau();
                in_tau = true;
            } else if (n_periods) {
                if (!ctx.bounded) {
                    throw unbounded_motion_error("--periods needs a bounded orbit");
                }
                span = *n_periods * ctx.T_t;
            } else {
                throw domain_error("one of --t-span, --tau-span, --periods is required");
            }
            if (!std::isfinite(span) || !std::isfinite(epoch)) {
                throw domain_error("span and epoch must be finite");
            }
            if (samples < 2 && span != 0.0) {
                throw domain_error("a non-zero span needs at least 2 samples");
            }
            for (double x : linspace(0.0, span, samples)) {
                rows.push_back(in_tau ? propagate_tau(ctx, x) : propagate(ctx, x));
            }
            Sink sink(o, out);
            write_samples(rows, ctx, u, epoch, o, *sink.os);
        } else if (*cls) {
            const InitialState s = sc.canonical();
            const BoundednessReport rep = bounded_condition(s);
            const CubicF f = build_f(s);
            json rec;
            rec["status"] = rep.marginal ? "marginal" : (rep.bounded ? "bounded" : "unbounded");
            rec["tag"] = to_string(rep.tag);
            rec["margin"] = rep.margin;
            rec["r_lo"] = rep.r_lo * u.length;
            rec["r_hi"] = std::isinf(rep.r_hi) ? json(nullptr) : json(rep.r_hi * u.length);
            rec["e_k"] = rep.e_k;
            std::array<complex, 3> fr = f.roots;
            for (auto& z : fr) {
                z *= u.length;
            }
            rec["f_roots"] = roots_json(fr);
            rec["g_roots"] = roots_json(rep.g_roots);
            Sink sink(o, out);
            emit_record(rec, o, *sink.os);
        } else if (*per) {
            Sink sink(o, out);
            if (sweep) {
                std::ostream& os = *sink.os;
                json doc = json::array();
                if (o.format == "csv") {
                    os << "v_p,alpha,T_tau,T_t\n";
                }
                for (double vp : linspace(vp_min, vp_max, vp_steps)) {
                    for (double a : linspace(a_min, a_max, a_steps)) {
                        Scenario row = sc;
                        row.v0 = vp;
                        row.alpha = a;
                        const InitialState s = row.canonical();
                        if (s.alpha == 0.0) {
                            continue;
                        }
                        try {
                            const SolutionContext ctx = build_context(s);
                            if (!ctx.bounded) {
                                continue;
                            }
                            const double Tt = ctx.T_tau * u.tau();
                            const double T = ctx.T_t * u.time();
                            if (o.format == "csv") {
                                os << fmt(vp) << ',' << fmt(a) << ',' << fmt(Tt) << ',' << fmt(T) << '\n';
                            } else {
                                doc.push_back({{"v_p", vp}, {"alpha", a}, {"T_tau", Tt}, {"T_t", T}});
                            }
                        } catch (const domain_error&) {
                            // Homoclinic or otherwise degenerate grid points have no period.
                        }
                    }
                }
                if (o.format == "json") {
                    os << doc.dump(2) << '\n';
                }
            } else {
                if (!per->count("--alpha")) {
                    throw domain_error("--alpha is required unless --sweep is given");
                }
                const SolutionContext ctx = build_context(sc.canonical());
                if (!ctx.bounded) {
                    throw unbounded_motion_error("unbounded orbit: no period");
                }
                const PeriodInfo p = periods(ctx);
                if (std::abs(p.T_t - p.T_t_implicit) > 1e-8 * std::abs(p.T_t)) {
                    throw convergence_error("period cross-check failed: closed forms disagree");
                }
                if (kepler_curve) {
                    std::ostream& os = *sink.os;
                    json doc = json::array();
                    if (o.format == "csv") {
                        os << "tau,t\n";
                    }
                    for (double tau : linspace(0.0, ctx.T_tau, std::max(samples, 2))) {
                        const double t = radial_kepler(ctx, tau);
                        if (o.format == "csv") {
                            os << fmt(tau * u.tau()) << ',' << fmt(t * u.time()) << '\n';
                        } else {
                            doc.push_back({{"tau", tau * u.tau()}, {"t", t * u.time()}});
                        }
                    }
                    if (o.format == "json") {
                        os << doc.dump(2) << '\n';
                    }
                } else {
                    json rec;
                    rec["T_tau"] = p.T_tau * u.tau();
                    rec["T_t"] = p.T_t * u.time();
                    rec["T_t_implicit"] = p.T_t_implicit * u.time();
                    rec["theta_period"] = p.theta_period;
                    emit_record(rec, o, *sink.os);
                }
            }
        } else if (*fp) {
            if (M < 0 || N <= 0) {
                throw domain_error("need M >= 0 and N > 0");
            }
            const double q = static_cast<double>(M) / N;
            const double v = find_periodic_v(rm / u.length, fp_alpha / u.accel(), q, v_lo / u.speed(), v_hi / u.speed());
            const SolutionContext ctx = build_context({rm / u.length, v, 0.0, fp_alpha / u.accel()});
            json rec;
            rec["v_m"] = v * u.speed();
            rec["q"] = q;
            rec["T_t"] = ctx.T_t * u.time();
            rec["closure_time"] = N * ctx.T_t * u.time();
            rec["theta_period"] = ctx.theta_period;
            Sink sink(o, out);
            emit_record(rec, o, *sink.os);
        } else if (*esc) {
            const InitialState s = sc.canonical();
            const double a = escape_alpha(s.r0, s.v0, s.gamma0, e_lo / u.accel(), e_hi / u.accel());
            json rec;
            rec["alpha_star"] = a * u.accel();
            Sink sink(o, out);
            emit_record(rec, o, *sink.os);
        }
    } catch (const domain_error& e) {
        report(err, error_kind(e), e.what());
        return exit_domain;
    } catch (const std::exception& e) {
        report(err, error_kind(e), e.what());
        return exit_numerical;
    }
    return exit_ok;
}

} // namespace cra
