#pragma once

// Independent reference solutions: direct numerical integration of the
// equations of motion and adaptive quadrature of the radial integrals.

#include <vector>

#include "cra/radial.hpp"

namespace cra {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double collision_radius = 1e-8;
};

struct OdeSample {
    double t = 0.0;
    double r = 0.0;
    double theta = 0.0; // accumulated since t = 0
    double r_dot = 0.0;
    double theta_dot = 0.0;
    double v = 0.0;
    double gamma = 0.0;
};

// Samples at the requested times (any sign, any order). Cartesian state with
// x'' = -x/|x|^3 + alpha x/|x|. Throws domain_error on collision or for rtol
// outside [1e-13, 1e-6].
std::vector<OdeSample> integrate_ode(const InitialState& s, const std::vector<double>& times,
                                     const OdeOptions& opt = {});
OdeSample integrate_ode(const InitialState& s, double t, const OdeOptions& opt = {});

struct MeasuredPeriod {
    double T_t = 0.0;
    double theta = 0.0; // angle swept between the two passages
};

// Time and angle between two successive pericenter passages, located on the
// dense output of the integrator. Gives up after max_time.
MeasuredPeriod measure_radial_period(const InitialState& s, double max_time = 1e4, const OdeOptions& opt = {});

// Integral of r / sqrt(f(r)) from r_a to r_b (signed), endpoints may be
// simple roots of f. Throws domain_error if f < 0 somewhere on the interval.
double quadrature_tof(const CubicF& f, double r_a, double r_b);

// Integral of h / (r sqrt(f(r))) from r_a to r_b (signed).
double quadrature_theta(const CubicF& f, double r_a, double r_b);

// Integral of 1 / sqrt(f(r)) from r_a to r_b (signed): elapsed pseudo-time.
double quadrature_tau(const CubicF& f, double r_a, double r_b);

} // namespace cra
