#pragma once

// Weierstrass elliptic functions for real invariants and complex argument.
//
// Conventions: the cubic is 4 s^3 - g2 s - g3, its roots are ordered
// e1 >= e2 > e3 when the discriminant is positive and {a + ib, real, a - ib}
// when it is negative. omega and omega' are the half-periods with
// Im(omega'/omega) > 0, omega1 = omega, omega2 = omega + omega',
// omega3 = omega' and wp(omega_k) = e_k.
//
// Evaluation reduces the argument onto a Gauss-reduced lattice basis and uses
// Jacobi theta series in the nome of that basis (|q| <= exp(-pi sqrt(3)/2)),
// so a fixed, short truncation gives full double precision everywhere in the
// cell.

#include <array>
#include <complex>

#include "cra/cubic.hpp"

namespace cra {

inline constexpr double default_pole_guard = 1e-12;

struct Invariants {
    double g2 = 0.0;
    double g3 = 0.0;
};

struct GRoots {
    std::array<complex, 3> e;
    // g2^3 - 27 g3^2 (positive: three real roots).
    double discriminant = 0.0;
};

struct HalfPeriods {
    complex omega;
    complex omega_prime;
    complex omega1;
    complex omega2;
    complex omega3;
    complex eta;       // zeta(omega)
    complex eta_prime; // zeta(omega')
    double m = 0.0;    // elliptic parameter of the period computation

    const complex& omega_k(int k) const
    {
        return k == 0 ? omega1 : (k == 1 ? omega2 : omega3);
    }
};

namespace detail {

inline constexpr int theta_terms = 9;

// Reduced basis and theta constants used by every evaluation.
struct ThetaBasis {
    complex w1;   // reduced half-periods, Im(w3 / w1) >= sqrt(3)/2
    complex w3;
    complex eta1; // zeta(w1)
    complex eta3; // zeta(w3), from the Legendre relation
    complex e1;   // wp(w1)
    complex scale; // pi / (2 w1)
    complex th2;   // theta_2(0), theta_3(0), theta_4(0), theta_1'(0)
    complex th3;
    complex th4;
    complex th1p;
    std::array<complex, theta_terms> q_half; // q^((n + 1/2)^2)
    std::array<complex, theta_terms> q_int;  // q^(n^2)
    // Inverse of the real 2x2 map (s, t) -> 2 w1 s + 2 w3 t.
    std::array<double, 4> to_cell;
};

ThetaBasis make_theta_basis(complex period_a, complex period_b);

} // namespace detail

// Immutable evaluation context for one pair of invariants.
struct Lattice {
    Invariants inv;
    GRoots roots;
    HalfPeriods periods;
    detail::ThetaBasis basis;
    double pole_guard = default_pole_guard;
};

// Roots of 4 s^3 - g2 s - g3. Throws degenerate_lattice_error when the
// discriminant vanishes.
GRoots g_roots(const Invariants& inv);

HalfPeriods half_periods(const Invariants& inv, const GRoots& roots);

Lattice make_lattice(const Invariants& inv, double pole_guard = default_pole_guard);

// Half-period on the positive real axis (omega for a positive discriminant,
// omega + omega' otherwise).
double real_half_period(const Lattice& lat);

complex wp(complex z, const Lattice& lat);
complex wp_prime(complex z, const Lattice& lat);
complex zeta(complex z, const Lattice& lat);
complex sigma(complex z, const Lattice& lat);

// Both wp and wp' at once (shares the theta evaluation).
struct WpPair {
    complex wp;
    complex wp_prime;
};
WpPair wp_and_prime(complex z, const Lattice& lat);

enum class DerivativeSign { negative, positive };

// Solves wp(z) = w for z in the period parallelogram
// {2 s omega + 2 t omega' : 0 <= s, t < 1}. Of the two solutions z and -z
// (mod the lattice) the one whose wp' has the requested sign is returned;
// the sign is read from the real part of wp', or from the imaginary part when
// wp' is predominantly imaginary.
complex wp_inverse(complex w, const Lattice& lat, DerivativeSign branch);

// Complete elliptic integral of the first kind K(m), 0 <= m < 1, by the
// arithmetic-geometric mean.
double elliptic_K(double m);

// Carlson's symmetric integral R_F for complex arguments.
complex carlson_rf(complex x, complex y, complex z);

} // namespace cra
