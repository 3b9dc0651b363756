#pragma once

// Closed-form propagation in the pseudo-time tau (dt = r dtau). The origin
// tau = 0 is the pericenter; t and theta are measured from there too unless a
// function says otherwise.

#include <complex>

#include "cra/elliptic.hpp"
#include "cra/radial.hpp"

namespace cra {

struct SolutionContext {
    InitialState state;
    ConservedQuantities conserved;
    CubicF f;
    MotionClass motion;
    double r_m = 0.0;
    double v_m = 0.0;
    double f1_m = 0.0; // f'(r_m)
    double f2_m = 0.0; // f''(r_m)

    // wp with g2 = E^2/3 - alpha, g3 = alpha^2 h^2/4 + alpha E/6 - E^3/27.
    Lattice lattice;
    int k = 0;          // index of the root wp(omega_k) = e_k
    double e_k = 0.0;   // f''(r_m) / 24
    complex omega_k;
    double kepler_D = 0.0; // 3 e_k^2 - g2/4

    // Auxiliary pole of the angle integral: wp(v) = e_k - f'(r_m)/(4 r_m),
    // wp'(v) = i h f'(r_m) / (4 r_m^2).
    complex aux_v;
    complex aux_zeta; // zeta(aux_v)

    // Lattice for r = c wp(rho) - E/(3 alpha), c = (2/alpha)^(1/3), used by the
    // implicit time-of-flight route.
    Lattice implicit_lattice;
    double implicit_c = 0.0;

    bool bounded = false;
    double omega_r = 0.0;   // real half-period
    double T_tau = 0.0;     // pseudo-period (bounded only)
    double T_t = 0.0;       // physical radial period (bounded only)
    double theta_period = 0.0; // angle swept per radial period (bounded only)

    double tau0 = 0.0;  // pseudo-time of the initial state
    double t0 = 0.0;    // its time since pericenter
    double theta0 = 0.0;
};

// Throws the domain errors of build_f / classify_region, degenerate_lattice_error
// on a double root, no_solution_error without a positive pericenter.
SolutionContext build_context(const InitialState& s);

// r(tau) = r_m + f'(r_m) / (4 (wp(tau) - e_k)). tau = 0 gives r_m.
double r_of_tau(const SolutionContext& ctx, double tau);
// dr/dtau.
double r_prime_of_tau(const SolutionContext& ctx, double tau);

// Same trajectory anchored at the initial state instead of the pericenter:
// r(dtau) with dtau measured from the state, r(0) = r0.
double r_of_tau_general(const SolutionContext& ctx, double dtau);
double r_of_tau_general(const InitialState& s, double dtau);

// Pseudo-time at which the trajectory reaches r, on the outbound (sign > 0) or
// inbound leg. Throws domain_error when r lies outside the allowed arc.
double tau_of_r(const SolutionContext& ctx, double r, int sign);

// The unit-modulus factor sigma(v - tau)/sigma(v + tau) exp(2 tau zeta(v)).
complex angle_factor(const SolutionContext& ctx, double tau);

// Polar angle swept since pericenter, continuous in tau.
double theta_of_tau(const SolutionContext& ctx, double tau);

// Time since pericenter at pseudo-time tau.
double radial_kepler(const SolutionContext& ctx, double tau);

// Inverse of radial_kepler. Throws convergence_error if the safeguarded
// iteration stalls.
double invert_kepler(const SolutionContext& ctx, double t);

// Time to travel from r_start to r_end along a monotone leg of the allowed arc
// (outbound when ascending), evaluated with the implicit lattice. Throws
// domain_error if either radius is outside the arc or the order contradicts
// the direction.
double time_of_flight_implicit(const SolutionContext& ctx, double r_start, double r_end, bool ascending);

struct PropagatedState {
    double t = 0.0;     // since the initial state
    double tau = 0.0;   // pericenter-referenced
    double r = 0.0;
    double theta = 0.0; // since the initial state
    double v = 0.0;
    double gamma = 0.0;
    double r_dot = 0.0;
};

PropagatedState propagate(const SolutionContext& ctx, double dt);
PropagatedState propagate(const InitialState& s, double dt);

// Same sample addressed by pseudo-time offset from the initial state.
PropagatedState propagate_tau(const SolutionContext& ctx, double dtau);

} // namespace cra
