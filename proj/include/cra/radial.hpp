#pragma once

// Problem instance, the dynamics cubic f(r) = 2 alpha r^3 + 2 E r^2 + 2 r - h^2
// and the taxonomy of allowed radial motion. Canonical units, mu = 1.

#include <array>
#include <complex>
#include <limits>

#include "cra/cubic.hpp"

namespace cra {

struct InitialState {
    double r0 = 1.0;
    double v0 = 1.0;
    double gamma0 = 0.0; // flight-path angle, radians, positive when climbing
    double alpha = 0.0;  // radial acceleration, negative inward
};

// Throws domain_error unless r0 > 0, v0 >= 0, |gamma0| <= pi/2, all finite.
void validate(const InitialState& s);

struct ConservedQuantities {
    double energy = 0.0;
    double momentum = 0.0;
};

ConservedQuantities conserved(const InitialState& s);

struct CubicF {
    // Coefficients of r^3, r^2, r, 1.
    std::array<double, 4> c{};
    std::array<complex, 3> roots;
    double discriminant = 0.0;
    bool double_root = false;

    double operator()(double r) const { return ((c[0] * r + c[1]) * r + c[2]) * r + c[3]; }
    double d1(double r) const { return (3.0 * c[0] * r + 2.0 * c[1]) * r + c[2]; }
    double d2(double r) const { return 6.0 * c[0] * r + 2.0 * c[1]; }
    double d3() const { return 6.0 * c[0]; }
    // Magnitude of the individual terms at r, the natural scale for residuals.
    double scale(double r) const;
};

CubicF make_f(double alpha, double energy, double momentum);

// Throws quadratic_degeneracy_error for alpha = 0 and infeasible_state_error
// if f(r0) is negative beyond rounding.
CubicF build_f(const InitialState& s);

enum class MotionTag {
    bounded_annulus,    // inward thrust: r in [e2, e1], nothing allowed outside
    bounded_inner_band, // outward thrust, three positive roots, r0 below the gap
    unbounded,          // allowed for all r above the lower endpoint
    homoclinic,         // an endpoint is a double root, approached asymptotically
};

struct MotionClass {
    MotionTag tag = MotionTag::unbounded;
    double r_lo = 0.0;
    double r_hi = std::numeric_limits<double>::infinity();

    bool bounded() const { return tag != MotionTag::unbounded; }
};

// Connected component of {r > 0 : f(r) >= 0} that contains r0.
MotionClass classify_region(const CubicF& f, double r0);

struct Pericenter {
    double r_m = 0.0;
    double v_m = 0.0;
};

// Lower endpoint of the allowed component and the speed there (h / r_m).
Pericenter pericenter(const CubicF& f, double r0);

// State at radius r on the orbit whose pericenter is (r_m, v_m): same energy
// and angular momentum, climbing when sign_rdot > 0.
InitialState state_on_orbit(double r_m, double v_m, double alpha, double r, int sign_rdot);

const char* to_string(MotionTag tag);

} // namespace cra
