#pragma once

// Derived orbit properties: periods, boundedness, escape thresholds and
// closed (periodic) trajectories.

#include <array>

#include "cra/propagation.hpp"

namespace cra {

// T_tau = 2 K(m) / sqrt(e1 - e3). Throws unbounded_motion_error for
// unbounded orbits.
double pseudo_period(const SolutionContext& ctx);

// Radial period in physical time from the zeta(T_tau / 2) closed form.
double true_period(const SolutionContext& ctx);

// Same period as twice the pericenter-to-apocenter flight time on the
// implicit lattice.
double true_period_implicit(const SolutionContext& ctx);

struct PeriodInfo {
    double T_tau = 0.0;
    double T_t = 0.0;
    double T_t_implicit = 0.0;
    double theta_period = 0.0;
};

PeriodInfo periods(const SolutionContext& ctx);

// Angle swept over N pseudo-periods, v_m T - 4 Im[(T/2) zeta(v) - v zeta(T/2)]
// per period, on the branch continuous with h / r integrated from pericenter.
double winding_increment(const SolutionContext& ctx, int N = 1);

struct BoundednessReport {
    bool bounded = false;
    bool marginal = false;
    // Positive: gap between the largest root of the g-cubic and e_k (bounded).
    // Negative: minus the distance from e_k to the nearest other root
    // (unbounded). Zero at the homoclinic boundary.
    double margin = 0.0;
    MotionTag tag = MotionTag::unbounded;
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::array<complex, 3> g_roots;
    double e_k = 0.0;
};

inline constexpr double marginal_tolerance = 1e-9;

// Works on degenerate (homoclinic) states as well.
BoundednessReport bounded_condition(const InitialState& s);
BoundednessReport bounded_condition(const SolutionContext& ctx);

struct PericenterStart {
    double alpha_star = 0.0;       // bounded iff alpha < alpha_star
    std::array<double, 3> w{};     // roots of the g-cubic, w1 = alpha r0/2 + E/6
    bool bounded = false;
};

// Closed-form threshold and g-cubic roots for a start at pericenter
// (gamma0 = 0, r0 the lower turning point).
PericenterStart pericenter_start_conditions(double r0, double v0, double alpha);

// Threshold alpha* separating bounded from unbounded motion for fixed
// (r0, v0, gamma0), by bisection on [alpha_lo, alpha_hi], whose ends must
// straddle the boundary. Throws bracket_error otherwise.
double escape_alpha(double r0, double v0, double gamma0, double alpha_lo = -1.0, double alpha_hi = 1.0,
                    double tol = 1e-13);

// Pericenter speed v_m in [v_lo, v_hi] for which the angle swept per radial
// period is 2 pi q modulo 2 pi up to orientation, i.e. the trajectory closes
// after N radial periods when q = M/N. Returns the lowest such v_m in the
// bracket. Throws no_solution_error if none exists.
double find_periodic_v(double r_m, double alpha, double q, double v_lo, double v_hi);

} // namespace cra
