#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dwell/errors.hpp"

namespace dwell {

using cplx = std::complex<double>;

namespace numerics {

inline constexpr double pi = 3.14159265358979323846;

/// erfi(z) = -i erf(iz). Maclaurin series near the origin, Faddeeva function
/// elsewhere. Throws OverflowError when |erfi(z)| is not representable.
cplx erfi(cplx z);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
cplx faddeeva(cplx z);

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
};

enum class Endpoint {
    regular,
    sqrt_left,   // integrand ~ (x-a)^(-1/2) or similar near a
    sqrt_right,
    sqrt_both,
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int intervals = 0;
    bool roundoff_limited = false;  // tolerance below the attainable round-off level
};

namespace detail {
inline std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    double floor;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// 21-point Kronrod rule; the embedded 10-point Gauss nodes sit at the odd
// Kronrod indices.
template <class T, class F>
Panel<T> gk21(F& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T k = fc * wk[0];
    T g{};
    double abs_sum = magnitude(fc) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double dx = h * x[i];
        const T f1 = f(c - dx), f2 = f(c + dx);
        k += (f1 + f2) * wk[i];
        abs_sum += (magnitude(f1) + magnitude(f2)) * wk[i];
        if (i % 2 == 1) g += (f1 + f2) * wg[i / 2];
    }
    const T kv = k * h;
    if (!finite_value(kv)) throw NumericalError("quadrature: integrand not finite");
    // round-off floor: differences below this are noise
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(h);
    return {a, b, kv, std::max(magnitude(kv - g * h), floor), floor};
}

}  // namespace detail

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b].
/// Endpoint modes apply substitutions that remove inverse square-root
/// endpoint singularities. Throws NumericalError when the tolerance is not met
/// within max_subdivisions bisections.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
               Endpoint mode = Endpoint::regular)
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1)
        throw DomainError("invalid quadrature specification");
    if (a == b) return {T{}, 0.0, 0};
    if (b < a) {
        auto r = integrate(f, b, a, spec, mode);
        r.value = -r.value;
        return r;
    }
    const double w = b - a;
    std::function<T(double)> g;
    double lo = 0.0, hi = 1.0;
    switch (mode) {
        case Endpoint::regular:
            g = [&](double x) { return T(f(x)); };
            lo = a;
            hi = b;
            break;
        case Endpoint::sqrt_left:
            g = [&](double u) { return T(f(a + w * u * u) * (2.0 * w * u)); };
            break;
        case Endpoint::sqrt_right:
            g = [&](double u) { return T(f(b - w * u * u) * (2.0 * w * u)); };
            break;
        case Endpoint::sqrt_both:
            // x = a + w (1 - cos(pi u))/2 clusters nodes at both ends.
            g = [&](double u) {
                const double s = std::sin(pi * u);
                return T(f(a + 0.5 * w * (1.0 - std::cos(pi * u))) * (0.5 * w * pi * s));
            };
            break;
    }
    std::priority_queue<detail::Panel<T>> heap;
    const auto first = detail::gk21<T>(g, lo, hi);
    T total = first.value;
    double err = first.error, floor = first.floor;
    heap.push(first);
    int n = 1;
    bool roundoff = false;
    while (err > std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total))) {
        if (err <= 2.0 * floor) {
            roundoff = true;
            break;
        }
        if (n >= spec.max_subdivisions)
            throw NumericalError("adaptive quadrature did not converge (estimated error " +
                                 detail::fmt_sci(err) + ")");
        const auto p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) throw NumericalError("adaptive quadrature: interval underflow");
        const auto l = detail::gk21<T>(g, p.a, m);
        const auto r = detail::gk21<T>(g, m, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        floor += l.floor + r.floor - p.floor;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    // re-sum to remove drift from the incremental updates
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return {sum, esum, n, roundoff};
}

/// Integral over [a, inf); `scale` is the length over which f decays and only
/// affects efficiency.
template <class F>
auto integrate_to_infinity(F&& f, double a, double scale = 1.0, const QuadratureSpec& spec = {})
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    auto g = [&](double t) -> T {
        if (t >= 1.0) return T{};
        const double d = 1.0 - t;
        const T v = f(a + scale * t / d);
        if (detail::magnitude(v) == 0.0) return T{};
        return v * (scale / (d * d));
    };
    return integrate(g, 0.0, 1.0, spec);
}

/// Composite 16-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
struct CompositeRule {
    std::vector<double> x, w;
    CompositeRule() = default;
    CompositeRule(double a, double b, int panels);
};

struct Bracket {
    double lo, hi;
};

/// Root of f inside a sign-changing bracket (TOMS 748).
double solve_bracket(const std::function<double(double)>& f, Bracket br, double xtol = 1e-15);

/// Roots of f on [lo, hi]: uniform scan with n_scan intervals, bracket refinement
/// of sign changes, and a best-effort local search for tangential roots.
std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi,
                               int n_scan);

/// |phi_n(u)|^2 for the orthonormal oscillator eigenfunction, 0 <= n <= 200.
double hermite_density(int n, double u);
/// phi_n(u) by the normalised upward recurrence.
double hermite_function(int n, double u);

/// Integral of tabulated samples on a sorted nonuniform grid (piecewise
/// quadratic through consecutive triples, trapezoid on a leftover interval).
double integrate_samples(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace numerics
}  // namespace dwell
