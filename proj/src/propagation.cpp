#include "cra/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "cra/errors.hpp"

namespace cra {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double two_pi = 2.0 * std::numbers::pi;
// Below this |tau| the pole of wp is replaced by its Taylor expansion.
constexpr double series_tau = 1e-6;

struct Reduced {
    double tau;
    double cycles;
};

Reduced reduce_bounded(const SolutionContext& ctx, double tau)
{
    const double n = std::round(tau / ctx.T_tau);
    return {tau - n * ctx.T_tau, n};
}

void check_unbounded_range(const SolutionContext& ctx, double tau)
{
    if (!(std::abs(tau) < ctx.omega_r)) {
        throw unbounded_motion_error("pseudo-time beyond the escape asymptote of an unbounded orbit");
    }
}

double r_local(const SolutionContext& ctx, double tau)
{
    if (std::abs(tau) < series_tau) {
        const double t2 = tau * tau;
        return ctx.r_m + ctx.f1_m * t2 / 4.0 * (1.0 + ctx.e_k * t2);
    }
    const double w = wp(complex(tau, 0.0), ctx.lattice).real();
    return ctx.r_m + ctx.f1_m / (4.0 * (w - ctx.e_k));
}

double r_prime_local(const SolutionContext& ctx, double tau)
{
    if (std::abs(tau) < series_tau) {
        return ctx.f1_m * tau / 2.0 * (1.0 + 2.0 * ctx.e_k * tau * tau);
    }
    const WpPair p = wp_and_prime(complex(tau, 0.0), ctx.lattice);
    const double d = p.wp.real() - ctx.e_k;
    return -ctx.f1_m * p.wp_prime.real() / (4.0 * d * d);
}

double kepler_local(const SolutionContext& ctx, double tau)
{
    if (tau == 0.0) {
        return 0.0;
    }
    const double a = std::abs(tau);
    const complex z(a, 0.0);
    const complex s = zeta(z - ctx.omega_k, ctx.lattice) + zeta(z + ctx.omega_k, ctx.lattice);
    const double t = ctx.r_m * a - ctx.f1_m / (8.0 * ctx.kepler_D) * (2.0 * ctx.e_k * a + s.real());
    return std::copysign(t, tau);
}

// h * integral of dtau / r over [0, tau]; only used to pick the 2 pi branch.
double theta_quadrature(const SolutionContext& ctx, double tau)
{
    const double h = ctx.conserved.momentum;
    auto integrand = [&](double s) { return h / r_local(ctx, s); };
    return boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, tau);
}

double theta_local(const SolutionContext& ctx, double tau)
{
    if (tau == 0.0) {
        return 0.0;
    }
    const double formula = ctx.v_m * tau - std::arg(angle_factor(ctx, tau));
    const double quad = theta_quadrature(ctx, tau);
    return formula + two_pi * std::round((quad - formula) / two_pi);
}

complex nearest_copy(complex z, complex target, const Lattice& lat)
{
    const auto& b = lat.basis;
    const complex d = z - target;
    const double s = b.to_cell[0] * d.real() + b.to_cell[1] * d.imag();
    const double t = b.to_cell[2] * d.real() + b.to_cell[3] * d.imag();
    complex best = z;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const complex c = z - 2.0 * b.w1 * (std::round(s) + i) - 2.0 * b.w3 * (std::round(t) + j);
            const double dist = std::abs(c - target);
            if (dist < best_dist) {
                best_dist = dist;
                best = c;
            }
        }
    }
    return best;
}

} // namespace

SolutionContext build_context(const InitialState& s)
{
    SolutionContext ctx;
    ctx.state = s;
    ctx.f = build_f(s);
    ctx.conserved = conserved(s);
    ctx.motion = classify_region(ctx.f, s.r0);
    if (ctx.f.double_root) {
        throw degenerate_lattice_error("f(r) has a repeated root: the lattice degenerates");
    }
    const Pericenter p = pericenter(ctx.f, s.r0);
    ctx.r_m = p.r_m;
    ctx.v_m = p.v_m;
    ctx.f1_m = ctx.f.d1(ctx.r_m);
    ctx.f2_m = ctx.f.d2(ctx.r_m);
    ctx.bounded = ctx.motion.bounded();

    const double alpha = s.alpha;
    const double E = ctx.conserved.energy;
    const double h = ctx.conserved.momentum;
    const Invariants inv{E * E / 3.0 - alpha, alpha * alpha * h * h / 4.0 + alpha * E / 6.0 - E * E * E / 27.0};
    ctx.lattice = make_lattice(inv);

    ctx.e_k = ctx.f2_m / 24.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const double d = std::abs(ctx.lattice.roots.e[i] - ctx.e_k);
        if (d < best) {
            best = d;
            ctx.k = i;
        }
    }
    ctx.omega_k = ctx.lattice.periods.omega_k(ctx.k);
    ctx.kepler_D = 3.0 * ctx.e_k * ctx.e_k - inv.g2 / 4.0;
    ctx.omega_r = real_half_period(ctx.lattice);

    const double w0 = ctx.e_k - ctx.f1_m / (4.0 * ctx.r_m);
    const complex target(0.0, h * ctx.f1_m / (4.0 * ctx.r_m * ctx.r_m));
    complex v = wp_inverse(complex(w0, 0.0), ctx.lattice, DerivativeSign::positive);
    const complex dv = wp_prime(v, ctx.lattice);
    if (std::abs(dv + target) < std::abs(dv - target)) {
        v = -v;
    }
    ctx.aux_v = v;
    ctx.aux_zeta = zeta(v, ctx.lattice);

    ctx.implicit_c = std::cbrt(2.0 / alpha);
    const double c2 = ctx.implicit_c * ctx.implicit_c;
    ctx.implicit_lattice = make_lattice({inv.g2 * c2 * c2, inv.g3 * c2 * c2 * c2});

    if (ctx.bounded) {
        ctx.T_tau = 2.0 * ctx.omega_r;
        const double eta_r = zeta(complex(ctx.omega_r, 0.0), ctx.lattice).real();
        ctx.T_t = ctx.r_m * ctx.T_tau - ctx.f1_m / (8.0 * ctx.kepler_D) * (2.0 * ctx.e_k * ctx.T_tau + 4.0 * eta_r);
        const double formula =
            ctx.v_m * ctx.T_tau - 4.0 * (ctx.omega_r * ctx.aux_zeta - eta_r * ctx.aux_v).imag();
        const double quad = 2.0 * theta_quadrature(ctx, ctx.omega_r);
        ctx.theta_period = formula + two_pi * std::round((quad - formula) / two_pi);
    }

    ctx.tau0 = tau_of_r(ctx, s.r0, s.gamma0 >= 0.0 ? 1 : -1);
    ctx.t0 = radial_kepler(ctx, ctx.tau0);
    ctx.theta0 = theta_of_tau(ctx, ctx.tau0);
    return ctx;
}

double r_of_tau(const SolutionContext& ctx, double tau)
{
    if (ctx.bounded) {
        return r_local(ctx, reduce_bounded(ctx, tau).tau);
    }
    check_unbounded_range(ctx, tau);
    return r_local(ctx, tau);
}

double r_prime_of_tau(const SolutionContext& ctx, double tau)
{
    if (ctx.bounded) {
        return r_prime_local(ctx, reduce_bounded(ctx, tau).tau);
    }
    check_unbounded_range(ctx, tau);
    return r_prime_local(ctx, tau);
}

double r_of_tau_general(const SolutionContext& ctx, double dtau)
{
    const InitialState& s = ctx.state;
    const CubicF& f = ctx.f;
    const double r0 = s.r0;
    const double sf = std::sqrt(std::max(0.0, f(r0)));
    const double sgn = s.gamma0 >= 0.0 ? 1.0 : -1.0;
    if (std::abs(dtau) < series_tau) {
        return r0 + sgn * sf * dtau + f.d1(r0) * dtau * dtau / 4.0;
    }
    const WpPair p = wp_and_prime(complex(dtau, 0.0), ctx.lattice);
    const double d = p.wp.real() - f.d2(r0) / 24.0;
    const double num = -sgn * sf * p.wp_prime.real() + 0.5 * f.d1(r0) * d + f(r0) * f.d3() / 24.0;
    return r0 + num / (2.0 * d * d);
}

double r_of_tau_general(const InitialState& s, double dtau)
{
    return r_of_tau_general(build_context(s), dtau);
}

double tau_of_r(const SolutionContext& ctx, double r, int sign)
{
    const double tol = 1e-10 * std::max(1.0, ctx.r_m);
    if (r < ctx.motion.r_lo - tol || r > ctx.motion.r_hi + tol) {
        throw domain_error("radius outside the allowed arc");
    }
    const double dr = r - ctx.r_m;
    if (dr <= 0.0) {
        return 0.0;
    }
    if (ctx.bounded && r >= ctx.motion.r_hi) {
        return sign >= 0 ? ctx.omega_r : -ctx.omega_r;
    }
    const double w = ctx.e_k + ctx.f1_m / (4.0 * dr);
    const auto& e = ctx.lattice.roots.e;
    double tau = std::clamp(carlson_rf(w - e[0], w - e[1], w - e[2]).real(), 0.0, ctx.omega_r);
    // One Newton step on r(tau) removes the residual of the integral.
    if (tau > series_tau && tau < ctx.omega_r) {
        const double rp = r_prime_local(ctx, tau);
        if (rp != 0.0) {
            const double step = (r - r_local(ctx, tau)) / rp;
            if (std::abs(step) < 1e-3 * tau) {
                tau += step;
            }
        }
    }
    return sign >= 0 ? tau : -tau;
}

complex angle_factor(const SolutionContext& ctx, double tau)
{
    const complex t(tau, 0.0);
    const complex v = ctx.aux_v;
    return sigma(v - t, ctx.lattice) / sigma(v + t, ctx.lattice) * std::exp(2.0 * t * ctx.aux_zeta);
}

double theta_of_tau(const SolutionContext& ctx, double tau)
{
    if (ctx.bounded) {
        const Reduced red = reduce_bounded(ctx, tau);
        return red.cycles * ctx.theta_period + theta_local(ctx, red.tau);
    }
    check_unbounded_range(ctx, tau);
    return theta_local(ctx, tau);
}

double radial_kepler(const SolutionContext& ctx, double tau)
{
    if (ctx.bounded) {
        const Reduced red = reduce_bounded(ctx, tau);
        return red.cycles * ctx.T_t + kepler_local(ctx, red.tau);
    }
    check_unbounded_range(ctx, tau);
    return kepler_local(ctx, tau);
}

double invert_kepler(const SolutionContext& ctx, double t)
{
    if (!std::isfinite(t)) {
        throw domain_error("invert_kepler: non-finite time");
    }
    double cycles = 0.0;
    double target = t;
    double lo = -ctx.omega_r;
    double hi = ctx.omega_r;
    if (ctx.bounded) {
        cycles = std::round(t / ctx.T_t);
        target = t - cycles * ctx.T_t;
        if (std::abs(target) >= ctx.T_t / 2.0) {
            return cycles * ctx.T_tau + std::copysign(ctx.omega_r, target);
        }
    }
    if (target == 0.0) {
        return cycles * ctx.T_tau;
    }
    const double ftol = 1e-14 * std::max(1.0, std::abs(target));
    double tau = std::clamp(target / ctx.r_m, 0.5 * lo, 0.5 * hi);
    for (int it = 0; it < 300; ++it) {
        const double g = kepler_local(ctx, tau) - target;
        if (std::abs(g) <= ftol) {
            return cycles * ctx.T_tau + tau;
        }
        (g > 0.0 ? hi : lo) = tau;
        double next = tau - g / r_local(ctx, tau);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - tau) <= 2.0 * eps * std::max(1.0, std::abs(tau)) || hi - lo <= 4.0 * eps * std::max(1.0, std::abs(tau))) {
            return cycles * ctx.T_tau + next;
        }
        tau = next;
    }
    throw convergence_error("invert_kepler: no convergence");
}

double time_of_flight_implicit(const SolutionContext& ctx, double r_start, double r_end, bool ascending)
{
    const double tol = 1e-10 * std::max(1.0, ctx.r_m);
    for (double r : {r_start, r_end}) {
        if (r < ctx.motion.r_lo - tol || r > ctx.motion.r_hi + tol) {
            throw domain_error("time_of_flight: radius outside the allowed arc");
        }
    }
    if ((r_end - r_start) * (ascending ? 1.0 : -1.0) < 0.0) {
        throw domain_error("time_of_flight: radii are not ordered along the requested leg");
    }
    if (r_start == r_end) {
        return 0.0;
    }
    const double alpha = ctx.state.alpha;
    const double shift = ctx.conserved.energy / (3.0 * alpha);
    const double c = ctx.implicit_c;
    const Lattice& lat = ctx.implicit_lattice;
    auto rho = [&](double r) {
        const double rc = std::clamp(r, ctx.motion.r_lo, ctx.motion.r_hi);
        const complex w((rc + shift) / c, 0.0);
        if (rc - ctx.motion.r_lo <= tol || ctx.motion.r_hi - rc <= tol) {
            // Turning point: the inverse is a half-period, where Newton on wp
            // loses half the digits.
            int j = 0;
            for (int i = 1; i < 3; ++i) {
                if (std::abs(lat.roots.e[i] - w) < std::abs(lat.roots.e[j] - w)) {
                    j = i;
                }
            }
            return lat.periods.omega_k(j);
        }
        return wp_inverse(w, lat, DerivativeSign::negative);
    };
    const complex mid = rho(0.5 * (r_start + r_end));
    const complex a = nearest_copy(rho(r_start), mid, lat);
    const complex b = nearest_copy(rho(r_end), mid, lat);
    const double dt = (c * c * (zeta(b, lat) - zeta(a, lat)) + shift * c * (b - a)).real();
    return ascending ? dt : -dt;
}

PropagatedState propagate_tau(const SolutionContext& ctx, double dtau)
{
    const double tau = ctx.tau0 + dtau;
    PropagatedState out;
    out.tau = tau;
    out.t = radial_kepler(ctx, tau) - ctx.t0;
    out.r = r_of_tau(ctx, tau);
    const double rp = r_prime_of_tau(ctx, tau);
    out.r_dot = rp / out.r;
    out.theta = theta_of_tau(ctx, tau) - ctx.theta0;
    const double alpha = ctx.state.alpha;
    const double E = ctx.conserved.energy;
    out.v = std::sqrt(std::max(0.0, 2.0 * (E + 1.0 / out.r + alpha * out.r)));
    out.gamma = std::atan2(rp, ctx.conserved.momentum);
    return out;
}

PropagatedState propagate(const SolutionContext& ctx, double dt)
{
    const double tau = invert_kepler(ctx, ctx.t0 + dt);
    PropagatedState out = propagate_tau(ctx, tau - ctx.tau0);
    out.t = dt;
    return out;
}

PropagatedState propagate(const InitialState& s, double dt)
{
    return propagate(build_context(s), dt);
}

} // namespace cra
