#pragma once

#include <array>
#include <complex>

namespace cra {

using complex = std::complex<double>;

// Roots of a real cubic a x^3 + b x^2 + c x + d, ordered by the usual
// convention for elliptic-function work: three real roots are sorted in
// descending order; with one real root the layout is {p + iq, real, p - iq}
// with q > 0.
struct CubicRoots {
    std::array<complex, 3> roots;
    // Sign matches the number of real roots: > 0 three distinct real roots,
    // < 0 one real root and a conjugate pair. Forced to 0 when a double root
    // is detected.
    double discriminant = 0.0;
    // Two (or three) roots coincide to working precision. The repeated root
    // is stored in both slots it occupies.
    bool double_root = false;
};

// a must be nonzero.
CubicRoots solve_cubic(double a, double b, double c, double d);

// Horner evaluation with complex argument.
complex eval_cubic(double a, double b, double c, double d, complex x);

} // namespace cra
