#include "cra/cubic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

namespace cra {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Newton polish of a real root of the monic cubic x^3 + b x^2 + c x + d.
// Only accepts steps that shrink the residual.
double polish(double x, double b, double c, double d)
{
    auto p = [&](double t) { return ((t + b) * t + c) * t + d; };
    double res = std::abs(p(x));
    for (int it = 0; it < 8 && res > 0.0; ++it) {
        const double dp = (3.0 * x + 2.0 * b) * x + c;
        if (dp == 0.0) {
            break;
        }
        const double xn = x - p(x) / dp;
        const double rn = std::abs(p(xn));
        if (!(rn < res)) {
            break;
        }
        x = xn;
        res = rn;
    }
    return x;
}

double residual_scale(double x, double b, double c, double d)
{
    const double ax = std::abs(x);
    return ax * ax * ax + std::abs(b) * ax * ax + std::abs(c) * ax + std::abs(d);
}

} // namespace

complex eval_cubic(double a, double b, double c, double d, complex x)
{
    return ((a * x + b) * x + c) * x + d;
}

CubicRoots solve_cubic(double a, double b, double c, double d)
{
    assert(a != 0.0);
    b /= a;
    c /= a;
    d /= a;

    CubicRoots out;
    auto p = [&](double t) { return ((t + b) * t + c) * t + d; };

    // Repeated roots are critical points of the cubic where it vanishes. The
    // critical points come from a well-conditioned quadratic, so this catches
    // the double root far more accurately than the trigonometric formula.
    const double dq = b * b - 3.0 * c;
    if (dq >= 0.0) {
        const double sq = std::sqrt(dq);
        // Stable quadratic roots of 3x^2 + 2bx + c.
        const double qq = -(b + std::copysign(sq, b));
        std::array<double, 2> crit{};
        int ncrit = 0;
        if (qq != 0.0) {
            crit[ncrit++] = qq / 3.0;
            crit[ncrit++] = c / qq;
        } else {
            crit[ncrit++] = -b / 3.0;
        }
        for (int i = 0; i < ncrit; ++i) {
            const double xc = crit[i];
            if (std::abs(p(xc)) <= 64.0 * eps * residual_scale(xc, b, c, d)) {
                const double xs = -b - 2.0 * xc;
                out.double_root = true;
                out.discriminant = 0.0;
                if (xs >= xc) {
                    out.roots = {complex(xs), complex(xc), complex(xc)};
                } else {
                    out.roots = {complex(xc), complex(xc), complex(xs)};
                }
                return out;
            }
        }
    }

    // Depressed form y^3 + P y + Q with x = y - b/3.
    const double shift = b / 3.0;
    const double P = c - b * b / 3.0;
    const double Q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;

    // First a single real root that is well separated from the other two.
    double x1 = 0.0;
    if (disc > 0.0 && P < 0.0) {
        const double amp = 2.0 * std::sqrt(-P / 3.0);
        const double arg = std::clamp((3.0 * Q / (2.0 * P)) * std::sqrt(-3.0 / P), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        std::array<double, 3> r{};
        for (int k = 0; k < 3; ++k) {
            r[k] = amp * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift;
        }
        double best = -1.0;
        for (int k = 0; k < 3; ++k) {
            const double sep = std::min(std::abs(r[k] - r[(k + 1) % 3]), std::abs(r[k] - r[(k + 2) % 3]));
            if (sep > best) {
                best = sep;
                x1 = r[k];
            }
        }
    } else {
        // Cardano with the cancellation-free choice of sign.
        const double sq = std::sqrt(std::max(0.0, Q * Q / 4.0 + P * P * P / 27.0));
        const double u = std::cbrt(-Q / 2.0 - std::copysign(sq, Q));
        x1 = (u != 0.0 ? u - P / (3.0 * u) : 0.0) - shift;
    }
    x1 = polish(x1, b, c, d);

    // Deflate: the other two roots have product q and sum s. Of the two Vieta
    // expressions for s, take the one with the smaller rounding error.
    double q;
    double sum;
    if (x1 != 0.0) {
        q = -d / x1;
        const double err_a = std::abs(b) + std::abs(x1);
        const double err_b = (std::abs(c) + std::abs(q)) / std::abs(x1);
        sum = err_a <= err_b ? -b - x1 : (c - q) / x1;
    } else {
        q = c;
        sum = -b;
    }
    const double dq2 = sum * sum - 4.0 * q;
    if (dq2 >= 0.0) {
        const double t = (sum + std::copysign(std::sqrt(dq2), sum)) / 2.0;
        const double x2 = polish(t, b, c, d);
        const double x3 = polish(t != 0.0 ? q / t : 0.0, b, c, d);
        std::array<double, 3> r{x1, x2, x3};
        std::sort(r.begin(), r.end(), std::greater<>());
        out.roots = {complex(r[0]), complex(r[1]), complex(r[2])};
        out.discriminant = std::pow((r[0] - r[1]) * (r[0] - r[2]) * (r[1] - r[2]), 2);
        return out;
    }
    const double re = sum / 2.0;
    const double im = std::sqrt(-dq2) / 2.0;
    out.roots = {complex(re, im), complex(x1), complex(re, -im)};
    const double m2 = std::norm(complex(x1 - re, im));
    out.discriminant = -4.0 * im * im * m2 * m2;
    return out;
}

} // namespace cra
