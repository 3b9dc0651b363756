#include "cra/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "cra/errors.hpp"

namespace cra {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_bounded(const SolutionContext& ctx, const char* what)
{
    if (!ctx.bounded) {
        throw unbounded_motion_error(std::string(what) + ": orbit is unbounded, no radial period");
    }
}

bool is_bounded(const InitialState& s)
{
    if (s.alpha == 0.0) {
        return s.v0 * s.v0 / 2.0 - 1.0 / s.r0 < 0.0;
    }
    return classify_region(build_f(s), s.r0).bounded();
}

double winding_turns(double r_m, double alpha, double v)
{
    const SolutionContext ctx = build_context({r_m, v, 0.0, alpha});
    require_bounded(ctx, "find_periodic_v");
    return ctx.theta_period / two_pi;
}

} // namespace

double pseudo_period(const SolutionContext& ctx)
{
    require_bounded(ctx, "pseudo_period");
    const auto& e = ctx.lattice.roots.e;
    const double e1 = e[0].real();
    const double e2 = e[1].real();
    const double e3 = e[2].real();
    return 2.0 * elliptic_K((e2 - e3) / (e1 - e3)) / std::sqrt(e1 - e3);
}

double true_period(const SolutionContext& ctx)
{
    const double T = pseudo_period(ctx);
    const double eta = zeta(complex(T / 2.0, 0.0), ctx.lattice).real();
    return ctx.r_m * T - ctx.f1_m / (8.0 * ctx.kepler_D) * (2.0 * ctx.e_k * T + 4.0 * eta);
}

double true_period_implicit(const SolutionContext& ctx)
{
    require_bounded(ctx, "true_period_implicit");
    return 2.0 * time_of_flight_implicit(ctx, ctx.r_m, ctx.motion.r_hi, true);
}

PeriodInfo periods(const SolutionContext& ctx)
{
    return {pseudo_period(ctx), true_period(ctx), true_period_implicit(ctx), winding_increment(ctx, 1)};
}

double winding_increment(const SolutionContext& ctx, int N)
{
    require_bounded(ctx, "winding_increment");
    return N * ctx.theta_period;
}

BoundednessReport bounded_condition(const InitialState& s)
{
    const CubicF f = build_f(s);
    const MotionClass mc = classify_region(f, s.r0);
    const Pericenter p = pericenter(f, s.r0);
    const ConservedQuantities q = conserved(s);
    const double E = q.energy;
    const double h = q.momentum;
    const double g2 = E * E / 3.0 - s.alpha;
    const double g3 = s.alpha * s.alpha * h * h / 4.0 + s.alpha * E / 6.0 - E * E * E / 27.0;

    BoundednessReport rep;
    rep.tag = mc.tag;
    rep.bounded = mc.bounded();
    rep.r_lo = mc.r_lo;
    rep.r_hi = mc.r_hi;
    rep.g_roots = solve_cubic(4.0, 0.0, -g2, -g3).roots;
    rep.e_k = f.d2(p.r_m) / 24.0;

    std::vector<double> real;
    for (const auto& e : rep.g_roots) {
        if (e.imag() == 0.0) {
            real.push_back(e.real());
        }
    }
    const double e_max = *std::max_element(real.begin(), real.end());
    if (rep.bounded) {
        rep.margin = e_max - rep.e_k;
    } else {
        // Skip the root that is e_k itself.
        std::array<double, 3> d;
        for (int i = 0; i < 3; ++i) {
            d[i] = std::abs(rep.g_roots[i] - rep.e_k);
        }
        std::sort(d.begin(), d.end());
        rep.margin = -d[1];
    }
    if (mc.tag == MotionTag::homoclinic) {
        rep.margin = 0.0;
    }
    rep.marginal = std::abs(rep.margin) < marginal_tolerance;
    return rep;
}

BoundednessReport bounded_condition(const SolutionContext& ctx)
{
    return bounded_condition(ctx.state);
}

PericenterStart pericenter_start_conditions(double r0, double v0, double alpha)
{
    if (!(r0 > 0.0) || !(v0 > 0.0)) {
        throw domain_error("pericenter_start_conditions: r0 and v0 must be positive");
    }
    const double x = r0 * v0 * v0;
    const double A = (1.0 - x) / (r0 * r0);
    const double B = (2.0 - x) * (2.0 - x) / (8.0 * r0 * r0 * r0 * v0 * v0);
    PericenterStart out;
    if (x < 2.0 / 3.0) {
        out.alpha_star = std::min(A, B);
    } else if (x <= 2.0) {
        out.alpha_star = B;
    } else {
        out.alpha_star = 0.0;
    }
    out.bounded = alpha < out.alpha_star;

    const double E = v0 * v0 / 2.0 - 1.0 / r0 - alpha * r0;
    const double w1 = alpha * r0 / 2.0 + E / 6.0;
    const double disc = (2.0 - x) * (2.0 - x) - 8.0 * alpha * r0 * r0 * r0 * v0 * v0;
    const double s = disc >= 0.0 ? std::sqrt(disc) / (8.0 * r0) : std::numeric_limits<double>::quiet_NaN();
    out.w = {w1, -w1 / 2.0 + s, -w1 / 2.0 - s};
    return out;
}

double escape_alpha(double r0, double v0, double gamma0, double alpha_lo, double alpha_hi, double tol)
{
    validate({r0, v0, gamma0, 0.0});
    if (!(alpha_lo < alpha_hi)) {
        throw bracket_error("escape_alpha: empty bracket");
    }
    const bool lo_b = is_bounded({r0, v0, gamma0, alpha_lo});
    const bool hi_b = is_bounded({r0, v0, gamma0, alpha_hi});
    if (lo_b == hi_b) {
        throw bracket_error("escape_alpha: both bracket ends have the same boundedness");
    }
    double a = alpha_lo;
    double b = alpha_hi;
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) {
            break;
        }
        (is_bounded({r0, v0, gamma0, mid}) == lo_b ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

double find_periodic_v(double r_m, double alpha, double q, double v_lo, double v_hi)
{
    if (!(v_lo > 0.0) || !(v_lo < v_hi) || !std::isfinite(q)) {
        throw domain_error("find_periodic_v: need 0 < v_lo < v_hi and finite q");
    }
    const double wa = winding_turns(r_m, alpha, v_lo);
    const double wb = winding_turns(r_m, alpha, v_hi);
    const double lo = std::min(wa, wb);
    const double hi = std::max(wa, wb);

    // Targets n + q and n - q inside the range of the winding over the bracket.
    std::vector<double> targets;
    for (double n = std::floor(lo) - 1.0; n <= std::ceil(hi) + 1.0; n += 1.0) {
        for (double t : {n + q, n - q}) {
            if (t >= lo && t <= hi) {
                targets.push_back(t);
            }
        }
    }
    if (targets.empty()) {
        throw no_solution_error("find_periodic_v: no closed trajectory with this winding in the bracket");
    }
    // The winding is monotone in v_m on the bracket; the lowest v_m belongs to
    // the target nearest the winding at v_lo.
    const double target = *std::min_element(targets.begin(), targets.end(), [&](double x, double y) {
        return std::abs(x - wa) < std::abs(y - wa);
    });
    auto g = [&](double v) { return winding_turns(r_m, alpha, v) - target; };
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, v_lo, v_hi, wa - target, wb - target,
                                                         boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
}

} // namespace cra
