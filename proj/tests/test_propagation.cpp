#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cra/oracle.hpp"
#include "cra/propagation.hpp"
#include "support.hpp"

using namespace cra;

namespace {

std::vector<SolutionContext> contexts(bool bounded, int n, std::uint64_t seed)
{
    std::vector<SolutionContext> out;
    for (const auto& s : test::random_instances(n, {bounded}, seed)) {
        out.push_back(build_context(s));
    }
    return out;
}

std::vector<double> taus(const SolutionContext& ctx, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const double lim = ctx.bounded ? 2.5 * ctx.T_tau : 0.95 * ctx.omega_r;
    std::uniform_real_distribution<double> u(-lim, lim);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

} // namespace

TEST_CASE("radius at and around pericenter")
{
    for (bool b : {true, false}) {
        for (const auto& ctx : contexts(b, 10, 21)) {
            CHECK(r_of_tau(ctx, 0.0) == ctx.r_m);
            for (double tau : taus(ctx, 10, 4)) {
                CHECK(r_of_tau(ctx, tau) == doctest::Approx(r_of_tau(ctx, -tau)).epsilon(1e-12));
                CHECK(r_of_tau(ctx, tau) >= ctx.r_m * (1.0 - 1e-12));
                if (ctx.bounded) {
                    CHECK(r_of_tau(ctx, tau) <= ctx.motion.r_hi * (1.0 + 1e-12));
                    CHECK(r_of_tau(ctx, tau + ctx.T_tau) == doctest::Approx(r_of_tau(ctx, tau)).epsilon(1e-11));
                }
            }
        }
    }
}

TEST_CASE("radius satisfies (dr/dtau)^2 = f(r)")
{
    for (bool b : {true, false}) {
        for (const auto& ctx : contexts(b, 10, 31)) {
            for (double tau : taus(ctx, 15, 6)) {
                const double r = r_of_tau(ctx, tau);
                const double rp = r_prime_of_tau(ctx, tau);
                CHECK(std::abs(rp * rp - ctx.f(r)) <= 1e-10 * std::max(1.0, ctx.f.scale(r)));
                const double step = 1e-5 * std::max(1.0, std::abs(tau));
                if (ctx.bounded || std::abs(tau) + step < ctx.omega_r) {
                    const double fd = (r_of_tau(ctx, tau + step) - r_of_tau(ctx, tau - step)) / (2.0 * step);
                    CHECK(fd == doctest::Approx(rp).epsilon(1e-6).scale(std::max(1.0, r)));
                }
            }
        }
    }
}

TEST_CASE("state-anchored radius agrees with the pericenter-anchored form")
{
    for (bool b : {true, false}) {
        for (const auto& ctx : contexts(b, 10, 41)) {
            CHECK(r_of_tau_general(ctx, 0.0) == ctx.state.r0);
            for (double d : {1e-8, 0.05, 0.4, -0.3, 1.1}) {
                const double tau = ctx.tau0 + d;
                if (!ctx.bounded && std::abs(tau) >= 0.95 * ctx.omega_r) {
                    continue;
                }
                CHECK(r_of_tau_general(ctx, d) == doctest::Approx(r_of_tau(ctx, tau)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("pseudo-time of a radius inverts r(tau)")
{
    for (const auto& ctx : contexts(true, 10, 51)) {
        CHECK(tau_of_r(ctx, ctx.r_m, 1) == 0.0);
        CHECK(tau_of_r(ctx, ctx.motion.r_hi, 1) == doctest::Approx(ctx.T_tau / 2).epsilon(1e-12));
        for (double x : {0.1, 0.5, 0.9}) {
            const double r = ctx.r_m + x * (ctx.motion.r_hi - ctx.r_m);
            const double tau = tau_of_r(ctx, r, -1);
            CHECK(tau < 0.0);
            CHECK(r_of_tau(ctx, tau) == doctest::Approx(r).epsilon(1e-12));
        }
        CHECK_THROWS_AS(tau_of_r(ctx, ctx.motion.r_hi * 1.01, 1), domain_error);
    }
}

TEST_CASE("radial Kepler equation")
{
    for (bool b : {true, false}) {
        for (const auto& ctx : contexts(b, 10, 61)) {
            CHECK(radial_kepler(ctx, 0.0) == 0.0);
            for (double tau : taus(ctx, 20, 7)) {
                const double t = radial_kepler(ctx, tau);
                CHECK(radial_kepler(ctx, -tau) == doctest::Approx(-t).epsilon(1e-12));
                const double back = invert_kepler(ctx, t);
                CHECK(std::abs(back - tau) <= 1e-10 * std::max(1.0, std::abs(tau)));
                const double step = 1e-5;
                if (ctx.bounded || std::abs(tau) + step < ctx.omega_r) {
                    const double fd = (radial_kepler(ctx, tau + step) - radial_kepler(ctx, tau - step)) / (2.0 * step);
                    CHECK(fd == doctest::Approx(r_of_tau(ctx, tau)).epsilon(1e-7));
                }
            }
            if (ctx.bounded) {
                CHECK(radial_kepler(ctx, ctx.T_tau / 2) == doctest::Approx(ctx.T_t / 2).epsilon(1e-12));
                CHECK(invert_kepler(ctx, ctx.T_t / 2) == doctest::Approx(ctx.T_tau / 2).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Kepler time matches quadrature of r / sqrt(f)")
{
    for (const auto& ctx : contexts(false, 8, 71)) {
        const double r = 3.0 * ctx.r_m;
        const double tau = tau_of_r(ctx, r, 1);
        CHECK(radial_kepler(ctx, tau) == doctest::Approx(quadrature_tof(ctx.f, ctx.r_m, r)).epsilon(1e-10));
    }
}

TEST_CASE("polar angle")
{
    for (bool b : {true, false}) {
        for (const auto& ctx : contexts(b, 10, 81)) {
            CHECK(theta_of_tau(ctx, 0.0) == 0.0);
            const double h = ctx.conserved.momentum;
            for (double tau : taus(ctx, 10, 8)) {
                CHECK(std::abs(std::abs(angle_factor(ctx, tau)) - 1.0) < 1e-9);
                const double th = theta_of_tau(ctx, tau);
                CHECK(theta_of_tau(ctx, -tau) == doctest::Approx(-th).epsilon(1e-10));
                const double step = 1e-5;
                if (ctx.bounded || std::abs(tau) + step < ctx.omega_r) {
                    const double fd = (theta_of_tau(ctx, tau + step) - theta_of_tau(ctx, tau - step)) / (2.0 * step);
                    CHECK(fd == doctest::Approx(h / r_of_tau(ctx, tau)).epsilon(1e-7));
                }
            }
            if (!ctx.bounded) {
                const double r = 4.0 * ctx.r_m;
                CHECK(theta_of_tau(ctx, tau_of_r(ctx, r, 1)) ==
                      doctest::Approx(quadrature_theta(ctx.f, ctx.r_m, r)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("implicit time of flight")
{
    for (const auto& ctx : contexts(true, 10, 91)) {
        const double lo = ctx.r_m;
        const double hi = ctx.motion.r_hi;
        const double a = lo + 0.2 * (hi - lo);
        const double b = lo + 0.7 * (hi - lo);
        CHECK(time_of_flight_implicit(ctx, a, a, true) == 0.0);
        CHECK(time_of_flight_implicit(ctx, lo, hi, true) == doctest::Approx(ctx.T_t / 2).epsilon(1e-10));
        CHECK(time_of_flight_implicit(ctx, a, b, true) == doctest::Approx(quadrature_tof(ctx.f, a, b)).epsilon(1e-10));
        CHECK(time_of_flight_implicit(ctx, b, a, false) == doctest::Approx(quadrature_tof(ctx.f, a, b)).epsilon(1e-10));
        CHECK_THROWS_AS(time_of_flight_implicit(ctx, b, a, true), domain_error);
        CHECK_THROWS_AS(time_of_flight_implicit(ctx, a, hi * 1.1, true), domain_error);
    }
    for (const auto& ctx : contexts(false, 10, 92)) {
        const double a = 1.3 * ctx.r_m;
        const double b = 6.0 * ctx.r_m;
        CHECK(time_of_flight_implicit(ctx, ctx.r_m, b, true) ==
              doctest::Approx(quadrature_tof(ctx.f, ctx.r_m, b)).epsilon(1e-10));
        CHECK(time_of_flight_implicit(ctx, a, b, true) == doctest::Approx(quadrature_tof(ctx.f, a, b)).epsilon(1e-10));
    }
}

TEST_CASE("propagation matches direct integration")
{
    for (bool b : {true, false}) {
        for (const auto& s : test::random_instances(6, {b}, 101)) {
            const SolutionContext ctx = build_context(s);
            const double span = ctx.bounded ? 2.0 * ctx.T_t : radial_kepler(ctx, tau_of_r(ctx, 8.0 * s.r0, 1)) - ctx.t0;
            std::vector<double> ts;
            for (int i = 0; i <= 12; ++i) {
                ts.push_back(span * i / 12.0);
            }
            const auto ref = integrate_ode(s, ts);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const PropagatedState p = propagate(ctx, ts[i]);
                CHECK(p.r == doctest::Approx(ref[i].r).epsilon(1e-8));
                CHECK(p.theta == doctest::Approx(ref[i].theta).epsilon(1e-8).scale(1.0));
                CHECK(p.r_dot == doctest::Approx(ref[i].r_dot).epsilon(1e-7).scale(1.0));
                CHECK(p.v == doctest::Approx(ref[i].v).epsilon(1e-8));
                CHECK(p.gamma == doctest::Approx(ref[i].gamma).epsilon(1e-7).scale(1.0));
            }
        }
    }
}

TEST_CASE("propagation preserves the conserved quantities and echoes the start")
{
    for (const auto& s : test::random_instances(10, {true}, 111)) {
        const SolutionContext ctx = build_context(s);
        const PropagatedState p0 = propagate(ctx, 0.0);
        CHECK(p0.r == doctest::Approx(s.r0).epsilon(1e-12));
        CHECK(p0.theta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(p0.v == doctest::Approx(s.v0).epsilon(1e-12));
        CHECK(p0.gamma == doctest::Approx(s.gamma0).epsilon(1e-8).scale(1.0));
        for (double t : {0.7, 3.1, 17.0}) {
            const PropagatedState p = propagate(ctx, t);
            CHECK(p.r * p.v * std::cos(p.gamma) == doctest::Approx(ctx.conserved.momentum).epsilon(1e-10));
        }
    }
}

TEST_CASE("domain limits")
{
    SUBCASE("homoclinic orbit has no lattice")
    {
        CHECK_THROWS_AS(build_context({1.0, 1.0, 0.0, 0.125}), degenerate_lattice_error);
    }
    SUBCASE("pseudo-time past the escape asymptote")
    {
        const SolutionContext ctx = build_context({1.0, 1.2, 0.0, 0.1});
        CHECK_FALSE(ctx.bounded);
        CHECK_THROWS_AS(r_of_tau(ctx, 1.01 * ctx.omega_r), unbounded_motion_error);
        CHECK(r_of_tau(ctx, 0.999 * ctx.omega_r) > 100.0);
    }
}
