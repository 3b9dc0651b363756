#pragma once

// Test-side reference computations that share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "cra/analysis.hpp"
#include "cra/errors.hpp"

namespace test {

using complex = std::complex<double>;

// Eigenvalues of the companion matrix of a x^3 + b x^2 + c x + d.
inline std::array<complex, 3> companion_roots(double a, double b, double c, double d)
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    m(0, 0) = -b / a;
    m(0, 1) = -c / a;
    m(0, 2) = -d / a;
    m(1, 0) = 1.0;
    m(2, 1) = 1.0;
    const Eigen::Vector3cd ev = m.eigenvalues();
    return {ev(0), ev(1), ev(2)};
}

// Largest distance from a root in `a` to its nearest neighbour in `b`.
inline double root_set_distance(const std::array<complex, 3>& a, const std::array<complex, 3>& b)
{
    double worst = 0.0;
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : b) {
            best = std::min(best, std::abs(x - y));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// Laurent coefficients c_k of wp(z) = 1/z^2 + sum_{k>=2} c_k z^(2k-2).
inline std::vector<double> laurent_coefficients(double g2, double g3, int n)
{
    std::vector<double> c(n + 1, 0.0);
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for (int k = 4; k <= n; ++k) {
        double s = 0.0;
        for (int m = 2; m <= k - 2; ++m) {
            s += c[m] * c[k - m];
        }
        c[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
    }
    return c;
}

inline complex laurent_wp(complex z, double g2, double g3)
{
    const auto c = laurent_coefficients(g2, g3, 60);
    complex s = 1.0 / (z * z);
    for (int k = 2; k <= 60; ++k) {
        s += c[k] * std::pow(z, 2 * k - 2);
    }
    return s;
}

inline complex laurent_zeta(complex z, double g2, double g3)
{
    const auto c = laurent_coefficients(g2, g3, 60);
    complex s = 1.0 / z;
    for (int k = 2; k <= 60; ++k) {
        s -= c[k] * std::pow(z, 2 * k - 1) / (2.0 * k - 1.0);
    }
    return s;
}

// Real half-period as the integral of ds / sqrt(4 s^3 - g2 s - g3) from the
// largest real root to infinity, with s = e + u^2.
inline double quadrature_real_half_period(const std::array<complex, 3>& e, double disc)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    if (disc > 0.0) {
        std::array<double, 3> r{e[0].real(), e[1].real(), e[2].real()};
        std::sort(r.begin(), r.end(), std::greater<>());
        const double a = r[0] - r[1];
        const double b = r[0] - r[2];
        return integrator.integrate([&](double u) { return 1.0 / std::sqrt((u * u + a) * (u * u + b)); });
    }
    complex pair;
    double real = 0.0;
    for (const auto& x : e) {
        if (x.imag() == 0.0) {
            real = x.real();
        } else {
            pair = x;
        }
    }
    return integrator.integrate([&](double u) { return 1.0 / std::abs(u * u + real - pair); });
}

// Invariant pairs covering both discriminant signs and both signs of g3.
inline std::vector<cra::Invariants> invariant_pairs()
{
    std::vector<cra::Invariants> v{
        {1.0, 0.1}, {1.0, -0.1}, {4.0, 1.0}, {4.0, -1.0}, {0.5, 0.0}, {2.0, 0.3},
        {1.0, 1.0}, {1.0, -1.0}, {-1.0, 0.5}, {-1.0, -0.5}, {0.0, 1.0}, {0.0, -1.0},
        {0.01, 0.000144}, {0.058, 0.0024}, {3.0, 0.9}, {3.0, -0.9}, {10.0, 2.0}, {10.0, -5.0},
        {0.2, 0.05}, {0.2, -0.05}, {-3.0, 2.0}, {7.0, 0.1}, {1e-2, -1e-4}, {0.3, 0.0201},
    };
    return v;
}

struct InstanceFilter {
    bool bounded = true;
    double max_period = 300.0;
    double min_margin = 2e-3;
};

// Random instances with alpha in [-0.2, 0.2] \ {0}, kept away from
// degenerate lattices and near-collision orbits.
inline std::vector<cra::InitialState> random_instances(int n, InstanceFilter filt, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(-0.2, 0.2);
    std::uniform_real_distribution<double> ur(0.7, 1.5);
    std::uniform_real_distribution<double> uv(0.6, 1.45);
    std::uniform_real_distribution<double> ug(-0.7, 0.7);
    std::vector<cra::InitialState> out;
    while (static_cast<int>(out.size()) < n) {
        cra::InitialState s;
        s.alpha = ua(rng);
        s.r0 = ur(rng);
        s.v0 = uv(rng) / std::sqrt(s.r0);
        s.gamma0 = ug(rng);
        if (std::abs(s.alpha) < 1e-3) {
            continue;
        }
        try {
            const auto ctx = cra::build_context(s);
            const auto rep = cra::bounded_condition(ctx);
            if (ctx.bounded != filt.bounded || std::abs(rep.margin) < filt.min_margin || ctx.r_m < 0.2) {
                continue;
            }
            if (ctx.bounded && ctx.T_t > filt.max_period) {
                continue;
            }
            out.push_back(s);
        } catch (const cra::domain_error&) {
        }
    }
    return out;
}

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace test
