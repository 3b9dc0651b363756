#include "cra/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "cra/errors.hpp"

namespace cra {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr complex I{0.0, 1.0};

// Relative size of g2^3 - 27 g3^2 below which the lattice is treated as
// degenerate.
constexpr double degenerate_tol = 1e-12;

double agm(double a, double g)
{
    for (int i = 0; i < 64; ++i) {
        if (std::abs(a - g) <= 2.0 * eps * a) {
            return (a + g) / 2.0;
        }
        const double an = (a + g) / 2.0;
        g = std::sqrt(a * g);
        a = an;
    }
    throw convergence_error("agm: no convergence");
}

// K(1 - m1); accurate when m1 is tiny (parameter close to 1).
double K_complement(double m1)
{
    return pi / (2.0 * agm(1.0, std::sqrt(m1)));
}

using detail::ThetaBasis;

struct ThetaValues {
    complex t1;
    complex t1p;
    complex t2;
    complex t3;
    complex t4;
};

ThetaValues thetas(complex nu, const ThetaBasis& b)
{
    ThetaValues v{0.0, 0.0, 0.0, 1.0, 1.0};
    for (int n = 0; n < detail::theta_terms; ++n) {
        const double odd = 2.0 * n + 1.0;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const complex s = std::sin(odd * nu);
        const complex c = std::cos(odd * nu);
        v.t1 += sgn * b.q_half[n] * s;
        v.t1p += sgn * odd * b.q_half[n] * c;
        v.t2 += b.q_half[n] * c;
        if (n > 0) {
            const complex c2 = std::cos(2.0 * n * nu);
            v.t3 += b.q_int[n] * c2;
            v.t4 += sgn * b.q_int[n] * c2;
        }
    }
    v.t1 *= 2.0;
    v.t1p *= 2.0;
    v.t2 *= 2.0;
    v.t3 = 2.0 * v.t3 - 1.0;
    v.t4 = 2.0 * v.t4 - 1.0;
    return v;
}

// z = zr + 2 m w1 + 2 n w3 with zr in the centred cell of the reduced basis.
struct Reduced {
    complex zr;
    double m;
    double n;
};

Reduced reduce(complex z, const ThetaBasis& b)
{
    const auto& A = b.to_cell;
    const double s = A[0] * z.real() + A[1] * z.imag();
    const double t = A[2] * z.real() + A[3] * z.imag();
    const double m = std::round(s);
    const double n = std::round(t);
    return {z - 2.0 * m * b.w1 - 2.0 * n * b.w3, m, n};
}

void check_finite(complex z, const char* what)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw domain_error(std::string(what) + ": non-finite argument");
    }
}

void pole_check(complex zr, double guard, const char* what)
{
    if (std::abs(zr) < guard) {
        throw pole_error(std::string(what) + ": argument within the pole guard of a lattice point");
    }
}

// The three square roots wp - e_k in theta form (DLMF 23.6.2-4); their
// product is -wp'/2.
struct RootRatios {
    complex r1;
    complex r2;
    complex r3;
};

RootRatios root_ratios(complex zr, const ThetaBasis& b)
{
    const ThetaValues t = thetas(b.scale * zr, b);
    return {b.scale * b.th3 * b.th4 * t.t2 / t.t1,
            b.scale * b.th2 * b.th4 * t.t3 / t.t1,
            b.scale * b.th2 * b.th3 * t.t4 / t.t1};
}

complex wp_basis(complex z, const ThetaBasis& b, double guard)
{
    const Reduced red = reduce(z, b);
    pole_check(red.zr, guard, "wp");
    const RootRatios r = root_ratios(red.zr, b);
    return b.e1 + r.r1 * r.r1;
}

complex zeta_basis(complex z, const ThetaBasis& b, double guard)
{
    const Reduced red = reduce(z, b);
    pole_check(red.zr, guard, "zeta");
    const ThetaValues t = thetas(b.scale * red.zr, b);
    return b.eta1 * red.zr / b.w1 + b.scale * t.t1p / t.t1 + 2.0 * red.m * b.eta1 + 2.0 * red.n * b.eta3;
}

struct Built {
    HalfPeriods periods;
    ThetaBasis basis;
};

Built build_periods(const GRoots& roots)
{
    Built out;
    auto& hp = out.periods;
    const auto& e = roots.e;
    if (roots.discriminant > 0.0) {
        const double e1 = e[0].real();
        const double e2 = e[1].real();
        const double e3 = e[2].real();
        const double span = e1 - e3;
        hp.m = (e2 - e3) / span;
        const double m1 = (e1 - e2) / span;
        const double root = std::sqrt(span);
        hp.omega = K_complement(m1) / root;
        hp.omega_prime = I * K_complement(hp.m) / root;
        out.basis = detail::make_theta_basis(2.0 * hp.omega, 2.0 * hp.omega_prime);
    } else {
        // Rhombic lattice: real half-period K(m)/sqrt(H2) on which wp = e2.
        const double e2 = e[1].real();
        const double H2 = std::abs(e[1] - e[0]);
        hp.m = 0.5 - 0.75 * e2 / H2;
        const double m1 = 0.5 + 0.75 * e2 / H2;
        const double root = std::sqrt(H2);
        const double R = K_complement(m1) / root;
        const double Im = K_complement(hp.m) / root;
        const complex a{R / 2.0, -Im / 2.0};
        const complex b{R / 2.0, Im / 2.0};
        out.basis = detail::make_theta_basis(2.0 * a, 2.0 * b);
        // Pick omega so that wp(omega) is the root with positive imaginary part.
        if (wp_basis(a, out.basis, 0.0).imag() > 0.0) {
            hp.omega = a;
            hp.omega_prime = b;
        } else {
            hp.omega = b;
            hp.omega_prime = -a;
        }
    }
    hp.omega1 = hp.omega;
    hp.omega2 = hp.omega + hp.omega_prime;
    hp.omega3 = hp.omega_prime;
    hp.eta = zeta_basis(hp.omega, out.basis, 0.0);
    hp.eta_prime = zeta_basis(hp.omega_prime, out.basis, 0.0);
    return out;
}

// Coordinates of z in the public basis (2 omega, 2 omega'), wrapped to [0, 1).
complex to_parallelogram(complex z, const HalfPeriods& hp)
{
    const complex a = 2.0 * hp.omega;
    const complex b = 2.0 * hp.omega_prime;
    const double det = a.real() * b.imag() - a.imag() * b.real();
    double s = (b.imag() * z.real() - b.real() * z.imag()) / det;
    double t = (-a.imag() * z.real() + a.real() * z.imag()) / det;
    auto wrap = [](double x) {
        x -= std::floor(x);
        if (x >= 1.0 - 1e-13) {
            x = 0.0;
        }
        return x;
    };
    s = wrap(s);
    t = wrap(t);
    return s * a + t * b;
}

int derivative_sign(complex d)
{
    const double c = (std::abs(d.real()) >= std::abs(d.imag())) ? d.real() : d.imag();
    return c < 0.0 ? -1 : 1;
}

} // namespace

namespace detail {

ThetaBasis make_theta_basis(complex period_a, complex period_b)
{
    // Lagrange-Gauss reduction.
    complex u = period_a;
    complex v = period_b;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(u) > std::abs(v)) {
            std::swap(u, v);
        }
        const double mu = std::round((v * std::conj(u)).real() / std::norm(u));
        if (mu == 0.0) {
            break;
        }
        v -= mu * u;
    }
    if ((v / u).imag() < 0.0) {
        v = -v;
    }

    ThetaBasis b;
    b.w1 = u / 2.0;
    b.w3 = v / 2.0;
    const complex tau = b.w3 / b.w1;
    complex th1ppp = 0.0;
    b.th2 = 0.0;
    b.th3 = 1.0;
    b.th4 = 1.0;
    b.th1p = 0.0;
    for (int n = 0; n < theta_terms; ++n) {
        const double h = n + 0.5;
        b.q_half[n] = std::exp(I * pi * tau * (h * h));
        b.q_int[n] = std::exp(I * pi * tau * double(n * n));
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const double odd = 2.0 * n + 1.0;
        b.th2 += 2.0 * b.q_half[n];
        b.th1p += 2.0 * sgn * odd * b.q_half[n];
        th1ppp += -2.0 * sgn * odd * odd * odd * b.q_half[n];
        if (n > 0) {
            b.th3 += 2.0 * b.q_int[n];
            b.th4 += 2.0 * sgn * b.q_int[n];
        }
    }
    b.scale = pi / (2.0 * b.w1);
    b.eta1 = -pi * pi * th1ppp / (12.0 * b.w1 * b.th1p);
    b.eta3 = (b.eta1 * b.w3 - I * (pi / 2.0)) / b.w1;
    const complex t2sq = b.th2 * b.th2;
    const complex t4sq = b.th4 * b.th4;
    b.e1 = b.scale * b.scale * (t2sq * t2sq + 2.0 * t4sq * t4sq) / 3.0;

    const double a00 = 2.0 * b.w1.real();
    const double a01 = 2.0 * b.w3.real();
    const double a10 = 2.0 * b.w1.imag();
    const double a11 = 2.0 * b.w3.imag();
    const double det = a00 * a11 - a01 * a10;
    b.to_cell = {a11 / det, -a01 / det, -a10 / det, a00 / det};
    return b;
}

} // namespace detail

GRoots g_roots(const Invariants& inv)
{
    if (!std::isfinite(inv.g2) || !std::isfinite(inv.g3)) {
        throw domain_error("g_roots: non-finite invariants");
    }
    const double g2c = inv.g2 * inv.g2 * inv.g2;
    const double g3s = 27.0 * inv.g3 * inv.g3;
    const double disc = g2c - g3s;
    const double scale = std::abs(g2c) + g3s;
    if (scale == 0.0 || std::abs(disc) <= degenerate_tol * scale) {
        throw degenerate_lattice_error("g_roots: g2^3 = 27 g3^2, the lattice is degenerate");
    }
    const CubicRoots cr = solve_cubic(4.0, 0.0, -inv.g2, -inv.g3);
    if (cr.double_root) {
        throw degenerate_lattice_error("g_roots: repeated root, the lattice is degenerate");
    }
    return {cr.roots, disc};
}

HalfPeriods half_periods(const Invariants& inv, const GRoots& roots)
{
    (void)inv;
    return build_periods(roots).periods;
}

Lattice make_lattice(const Invariants& inv, double pole_guard)
{
    Lattice lat;
    lat.inv = inv;
    lat.roots = g_roots(inv);
    Built b = build_periods(lat.roots);
    lat.periods = b.periods;
    lat.basis = b.basis;
    lat.pole_guard = pole_guard;
    return lat;
}

double real_half_period(const Lattice& lat)
{
    return lat.roots.discriminant > 0.0 ? lat.periods.omega.real() : lat.periods.omega2.real();
}

complex wp(complex z, const Lattice& lat)
{
    check_finite(z, "wp");
    return wp_basis(z, lat.basis, lat.pole_guard);
}

complex wp_prime(complex z, const Lattice& lat)
{
    check_finite(z, "wp_prime");
    const Reduced red = reduce(z, lat.basis);
    pole_check(red.zr, lat.pole_guard, "wp_prime");
    const RootRatios r = root_ratios(red.zr, lat.basis);
    return -2.0 * r.r1 * r.r2 * r.r3;
}

WpPair wp_and_prime(complex z, const Lattice& lat)
{
    check_finite(z, "wp");
    const Reduced red = reduce(z, lat.basis);
    pole_check(red.zr, lat.pole_guard, "wp");
    const RootRatios r = root_ratios(red.zr, lat.basis);
    return {lat.basis.e1 + r.r1 * r.r1, -2.0 * r.r1 * r.r2 * r.r3};
}

complex zeta(complex z, const Lattice& lat)
{
    check_finite(z, "zeta");
    return zeta_basis(z, lat.basis, lat.pole_guard);
}

complex sigma(complex z, const Lattice& lat)
{
    check_finite(z, "sigma");
    const ThetaBasis& b = lat.basis;
    const Reduced red = reduce(z, b);
    const ThetaValues t = thetas(b.scale * red.zr, b);
    const complex base = std::exp(b.eta1 * red.zr * red.zr / (2.0 * b.w1)) * t.t1 / (b.scale * b.th1p);
    if (red.m == 0.0 && red.n == 0.0) {
        return base;
    }
    // sigma(z + 2W) = (-1)^(m + n + mn) exp(2 H (z + W)) sigma(z), W = m w1 + n w3.
    const long long m = static_cast<long long>(red.m);
    const long long n = static_cast<long long>(red.n);
    const double sgn = ((m + n + m * n) % 2 == 0) ? 1.0 : -1.0;
    const complex H = red.m * b.eta1 + red.n * b.eta3;
    const complex W = red.m * b.w1 + red.n * b.w3;
    return sgn * std::exp(2.0 * H * (red.zr + W)) * base;
}

complex carlson_rf(complex x, complex y, complex z)
{
    const complex x0 = x;
    const complex y0 = y;
    const complex A0 = (x + y + z) / 3.0;
    complex A = A0;
    const double Q = std::pow(3.0 * eps, -1.0 / 6.0) *
                     std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z)});
    double f = 1.0;
    int it = 0;
    for (; it < 100 && f * Q > std::abs(A); ++it) {
        const complex sx = std::sqrt(x);
        const complex sy = std::sqrt(y);
        const complex sz = std::sqrt(z);
        const complex lam = sx * sy + sx * sz + sy * sz;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        A = (A + lam) / 4.0;
        f /= 4.0;
    }
    if (it == 100) {
        throw convergence_error("carlson_rf: no convergence");
    }
    const complex X = (A0 - x0) * f / A;
    const complex Y = (A0 - y0) * f / A;
    const complex Z = -(X + Y);
    const complex E2 = X * Y - Z * Z;
    const complex E3 = X * Y * Z;
    return (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0) / std::sqrt(A);
}

complex wp_inverse(complex w, const Lattice& lat, DerivativeSign branch)
{
    check_finite(w, "wp_inverse");
    const auto& e = lat.roots.e;
    const double wscale = std::max(1.0, std::abs(w));

    auto newton = [&](complex z) {
        for (int it = 0; it < 8; ++it) {
            const WpPair p = wp_and_prime(z, lat);
            if (std::abs(p.wp_prime) == 0.0) {
                break;
            }
            const complex dz = (p.wp - w) / p.wp_prime;
            if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) {
                break;
            }
            z -= dz;
            if (std::abs(dz) <= 4.0 * eps * (1.0 + std::abs(z))) {
                break;
            }
        }
        return z;
    };

    // Two attempts: the plain integral, then one with w nudged off the real
    // axis in case an argument of R_F sits on its branch cut.
    const std::array<complex, 2> probes{w, w + complex(0.0, 1e-9 * wscale)};
    for (const complex& wp0 : probes) {
        complex z = carlson_rf(wp0 - e[0], wp0 - e[1], wp0 - e[2]);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            continue;
        }
        if (std::abs(z) >= lat.pole_guard) {
            z = newton(z);
        }
        if (std::abs(z) < lat.pole_guard) {
            continue;
        }
        const int want = branch == DerivativeSign::positive ? 1 : -1;
        complex best = to_parallelogram(z, lat.periods);
        const WpPair p = wp_and_prime(best, lat);
        if (derivative_sign(p.wp_prime) != want) {
            best = to_parallelogram(-z, lat.periods);
        }
        const complex res = wp(best, lat) - w;
        if (std::abs(res) <= 1e-10 * wscale) {
            return best;
        }
    }
    throw no_solution_error("wp_inverse: no solution found for the requested branch");
}

double elliptic_K(double m)
{
    if (!(m >= 0.0 && m < 1.0)) {
        throw domain_error("elliptic_K: parameter outside [0, 1)");
    }
    return K_complement(1.0 - m);
}

} // namespace cra
