#include "cra/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cra/errors.hpp"

namespace cra {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

struct RealRoot {
    double r;
    bool repeated;
};

std::vector<RealRoot> real_roots(const CubicF& f)
{
    std::vector<RealRoot> out;
    if (f.double_root) {
        const double a = f.roots[0].real();
        const double b = f.roots[1].real();
        const double c = f.roots[2].real();
        // The repeated value occupies two adjacent slots.
        if (a == b) {
            out.push_back({a, true});
            out.push_back({c, false});
        } else {
            out.push_back({a, false});
            out.push_back({b, true});
        }
    } else if (f.discriminant > 0.0) {
        for (const auto& z : f.roots) {
            out.push_back({z.real(), false});
        }
    } else {
        out.push_back({f.roots[1].real(), false});
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& x, const RealRoot& y) { return x.r < y.r; });
    return out;
}

} // namespace

void validate(const InitialState& s)
{
    if (!std::isfinite(s.r0) || !std::isfinite(s.v0) || !std::isfinite(s.gamma0) || !std::isfinite(s.alpha)) {
        throw domain_error("initial state: non-finite value");
    }
    if (!(s.r0 > 0.0)) {
        throw domain_error("initial state: r0 must be positive");
    }
    if (s.v0 < 0.0) {
        throw domain_error("initial state: v0 must be non-negative");
    }
    if (std::abs(s.gamma0) > std::numbers::pi / 2.0) {
        throw domain_error("initial state: flight-path angle outside [-pi/2, pi/2]");
    }
}

ConservedQuantities conserved(const InitialState& s)
{
    validate(s);
    return {s.v0 * s.v0 / 2.0 - 1.0 / s.r0 - s.alpha * s.r0, s.r0 * s.v0 * std::cos(s.gamma0)};
}

double CubicF::scale(double r) const
{
    const double a = std::abs(r);
    return ((std::abs(c[0]) * a + std::abs(c[1])) * a + std::abs(c[2])) * a + std::abs(c[3]);
}

CubicF make_f(double alpha, double energy, double momentum)
{
    if (alpha == 0.0) {
        throw quadratic_degeneracy_error("f(r): alpha = 0 reduces the cubic to a quadratic (Kepler problem)");
    }
    CubicF f;
    f.c = {2.0 * alpha, 2.0 * energy, 2.0, -momentum * momentum};
    const CubicRoots cr = solve_cubic(f.c[0], f.c[1], f.c[2], f.c[3]);
    f.roots = cr.roots;
    f.discriminant = cr.discriminant;
    f.double_root = cr.double_root;
    return f;
}

CubicF build_f(const InitialState& s)
{
    const ConservedQuantities q = conserved(s);
    CubicF f = make_f(s.alpha, q.energy, q.momentum);
    if (f(s.r0) < -1e-12 * f.scale(s.r0)) {
        throw infeasible_state_error("f(r0) < 0: the state is not on an allowed arc");
    }
    return f;
}

MotionClass classify_region(const CubicF& f, double r0)
{
    const auto roots = real_roots(f);
    const double tol = 1e-12 * std::max(1.0, r0);
    // r0 sits on a turning point when f(r0) vanishes to rounding. It then
    // stands in for the nearest computed root, and the sign of f'(r0) says
    // which end of the component it is.
    const bool at_root = std::abs(f(r0)) <= 64.0 * eps * f.scale(r0);
    std::size_t skip = roots.size();
    if (at_root) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (std::abs(roots[i].r - r0) < best) {
                best = std::abs(roots[i].r - r0);
                skip = i;
            }
        }
    }

    MotionClass mc;
    if (at_root && skip < roots.size() && roots[skip].repeated && std::abs(roots[skip].r - r0) <= 1e-8 * r0) {
        // Equilibrium radius: the orbit is a circle.
        mc.r_lo = mc.r_hi = r0;
        mc.tag = MotionTag::homoclinic;
        return mc;
    }
    const double slope = at_root ? f.d1(r0) : 0.0;

    mc.r_lo = -std::numeric_limits<double>::infinity();
    bool lo_repeated = false;
    bool hi_repeated = false;
    if (at_root && slope > 0.0) {
        mc.r_lo = r0;
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const auto& rt = roots[i];
        const bool rising = rt.repeated || f.d1(rt.r) > 0.0;
        if (i != skip && rising && rt.r <= r0 + tol && rt.r > mc.r_lo) {
            mc.r_lo = rt.r;
            lo_repeated = rt.repeated;
        }
    }
    if (at_root && slope < 0.0) {
        mc.r_hi = r0;
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const auto& rt = roots[i];
        const bool falling = rt.repeated || f.d1(rt.r) < 0.0;
        if (i != skip && falling && rt.r >= r0 - tol && rt.r > mc.r_lo && rt.r < mc.r_hi) {
            mc.r_hi = rt.r;
            hi_repeated = rt.repeated;
        }
    }
    if (!(mc.r_lo >= 0.0)) {
        mc.r_lo = 0.0;
    }

    if (lo_repeated || hi_repeated) {
        mc.tag = MotionTag::homoclinic;
    } else if (std::isinf(mc.r_hi)) {
        mc.tag = MotionTag::unbounded;
    } else if (f.c[0] < 0.0) {
        mc.tag = MotionTag::bounded_annulus;
    } else {
        mc.tag = MotionTag::bounded_inner_band;
    }
    return mc;
}

Pericenter pericenter(const CubicF& f, double r0)
{
    const MotionClass mc = classify_region(f, r0);
    if (!(mc.r_lo > 1e-12 * r0)) {
        throw no_solution_error("pericenter: the allowed arc reaches r = 0 (no angular momentum)");
    }
    const double h = std::sqrt(std::max(0.0, -f.c[3]));
    return {mc.r_lo, h / mc.r_lo};
}

InitialState state_on_orbit(double r_m, double v_m, double alpha, double r, int sign_rdot)
{
    const double energy = v_m * v_m / 2.0 - 1.0 / r_m - alpha * r_m;
    const double h = r_m * v_m;
    const double v2 = 2.0 * (energy + 1.0 / r + alpha * r);
    if (!(v2 >= 0.0)) {
        throw infeasible_state_error("state_on_orbit: radius not reachable on this orbit");
    }
    const double v = std::sqrt(v2);
    const double cg = std::clamp(h / (r * v), -1.0, 1.0);
    const double gamma = std::acos(cg);
    return {r, v, sign_rdot >= 0 ? gamma : -gamma, alpha};
}

const char* to_string(MotionTag tag)
{
    switch (tag) {
    case MotionTag::bounded_annulus:
        return "bounded-annulus";
    case MotionTag::bounded_inner_band:
        return "bounded-inner-band";
    case MotionTag::unbounded:
        return "unbounded";
    case MotionTag::homoclinic:
        return "homoclinic";
    }
    return "unknown";
}

} // namespace cra
