#include "cra/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "cra/errors.hpp"

namespace cra {

namespace {

using State = std::array<double, 5>; // x, y, vx, vy, theta

struct Rhs {
    double alpha;
    double h;
    double collision;

    void operator()(const State& s, State& ds, double) const
    {
        const double r = std::hypot(s[0], s[1]);
        if (r < collision) {
            throw domain_error("integrate_ode: collision with the central body");
        }
        const double k = -1.0 / (r * r * r) + alpha / r;
        ds = {s[2], s[3], k * s[0], k * s[1], h / (r * r)};
    }
};

OdeSample to_sample(double t, const State& s, double h)
{
    OdeSample o;
    o.t = t;
    o.r = std::hypot(s[0], s[1]);
    o.theta = s[4];
    o.r_dot = (s[0] * s[2] + s[1] * s[3]) / o.r;
    o.theta_dot = h / (o.r * o.r);
    o.v = std::hypot(s[2], s[3]);
    o.gamma = std::atan2(o.r_dot, h / o.r);
    return o;
}

template <class F>
double endpoint_safe(F&& g, const CubicF& f, double a, double b)
{
    if (a == b) {
        return 0.0;
    }
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double mid = 0.5 * (lo + hi);
    const double tol = 1e-12 * std::max(1.0, hi);
    for (const auto& z : f.roots) {
        if (z.imag() == 0.0 && z.real() > lo + tol && z.real() < hi - tol) {
            throw domain_error("quadrature: f changes sign inside the interval");
        }
    }
    if (f(mid) < 0.0) {
        throw domain_error("quadrature: interval lies in a forbidden region");
    }
    // r = lo + s^2 and r = hi - s^2 absorb inverse square-root endpoints;
    // f is evaluated from its roots so that a root at the endpoint yields s^2
    // exactly instead of a cancellation.
    auto f_at = [&](double base, double ds) {
        complex p(f.c[0], 0.0);
        for (const auto& z : f.roots) {
            const complex d = complex(base, 0.0) - z;
            // An endpoint within rounding of a root is that turning point.
            p *= std::abs(d) <= 1e-12 * std::max(1.0, std::abs(base)) ? complex(ds, 0.0) : d + ds;
        }
        return p.real();
    };
    auto lower = [&](double s) {
        const double v = f_at(lo, s * s);
        return v > 0.0 ? 2.0 * s * g(lo + s * s) / std::sqrt(v) : 0.0;
    };
    auto upper = [&](double s) {
        const double v = f_at(hi, -s * s);
        return v > 0.0 ? 2.0 * s * g(hi - s * s) / std::sqrt(v) : 0.0;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double span = std::sqrt(mid - lo);
    const double total = GK::integrate(lower, 0.0, span, 15, 1e-14) + GK::integrate(upper, 0.0, span, 15, 1e-14);
    return sign * total;
}

void check_options(const OdeOptions& opt)
{
    if (!(opt.rtol >= 1e-13 && opt.rtol <= 1e-6) || !(opt.atol > 0.0)) {
        throw domain_error("integrate_ode: tolerance outside the supported range");
    }
}

} // namespace

std::vector<OdeSample> integrate_ode(const InitialState& s, const std::vector<double>& times, const OdeOptions& opt)
{
    validate(s);
    check_options(opt);
    namespace odeint = boost::numeric::odeint;
    const double h = s.r0 * s.v0 * std::cos(s.gamma0);
    const Rhs rhs{s.alpha, h, opt.collision_radius};
    const State x0{s.r0, 0.0, s.v0 * std::sin(s.gamma0), s.v0 * std::cos(s.gamma0), 0.0};

    std::vector<OdeSample> out(times.size());
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return times[i] < times[j]; });

    // Forward and backward sweeps from t = 0.
    for (int dir : {1, -1}) {
        std::vector<double> ts{0.0};
        std::vector<std::size_t> idx;
        if (dir > 0) {
            for (std::size_t i : order) {
                if (times[i] == 0.0) {
                    out[i] = to_sample(0.0, x0, h);
                } else if (times[i] > 0.0) {
                    ts.push_back(times[i]);
                    idx.push_back(i);
                }
            }
        } else {
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                if (times[*it] < 0.0) {
                    ts.push_back(times[*it]);
                    idx.push_back(*it);
                }
            }
        }
        if (idx.empty()) {
            continue;
        }
        State x = x0;
        std::size_t n = 0;
        auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
        auto observer = [&](const State& st, double t) {
            if (n > 0) {
                out[idx[n - 1]] = to_sample(t, st, h);
            }
            ++n;
        };
        const double dt0 = dir * 1e-3 * std::max(1.0, s.r0);
        odeint::integrate_times(stepper, rhs, x, ts.begin(), ts.end(), dt0, observer);
    }
    return out;
}

OdeSample integrate_ode(const InitialState& s, double t, const OdeOptions& opt)
{
    return integrate_ode(s, std::vector<double>{t}, opt).front();
}

MeasuredPeriod measure_radial_period(const InitialState& s, double max_time, const OdeOptions& opt)
{
    validate(s);
    check_options(opt);
    namespace odeint = boost::numeric::odeint;
    const double h = s.r0 * s.v0 * std::cos(s.gamma0);
    const Rhs rhs{s.alpha, h, opt.collision_radius};
    State x{s.r0, 0.0, s.v0 * std::sin(s.gamma0), s.v0 * std::cos(s.gamma0), 0.0};
    auto radial = [](const State& st) { return st[0] * st[2] + st[1] * st[3]; };

    auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(x, 0.0, 1e-3 * std::max(1.0, s.r0));
    std::vector<std::pair<double, double>> passages;
    while (passages.size() < 2) {
        const auto [t0, t1] = stepper.do_step(rhs);
        if (t1 > max_time) {
            throw no_solution_error("measure_radial_period: no pericenter passage found");
        }
        State a;
        State b;
        stepper.calc_state(t0, a);
        stepper.calc_state(t1, b);
        if (!(radial(a) < 0.0 && radial(b) >= 0.0)) {
            continue;
        }
        double lo = t0;
        double hi = t1;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            State m;
            stepper.calc_state(mid, m);
            (radial(m) < 0.0 ? lo : hi) = mid;
        }
        State m;
        stepper.calc_state(hi, m);
        passages.emplace_back(hi, m[4]);
    }
    return {passages[1].first - passages[0].first, passages[1].second - passages[0].second};
}

double quadrature_tof(const CubicF& f, double r_a, double r_b)
{
    return endpoint_safe([](double r) { return r; }, f, r_a, r_b);
}

double quadrature_theta(const CubicF& f, double r_a, double r_b)
{
    const double h = std::sqrt(std::max(0.0, -f.c[3]));
    return endpoint_safe([h](double r) { return h / r; }, f, r_a, r_b);
}

double quadrature_tau(const CubicF& f, double r_a, double r_b)
{
    return endpoint_safe([](double) { return 1.0; }, f, r_a, r_b);
}

} // namespace cra
