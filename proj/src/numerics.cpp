#include "dwell/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cfloat>
#include <cmath>
#include <string>

namespace dwell::numerics {

namespace {

constexpr double two_over_sqrt_pi = 1.12837916709551257390;

cplx erfi_series(cplx z) {
    const cplx z2 = z * z;
    cplx term = z;  // z^(2n+1)/n!
    cplx sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= z2 / double(n);
        const cplx add = term / double(2 * n + 1);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
    }
    return two_over_sqrt_pi * sum;
}

}  // namespace

// Poppe & Wijers, ACM TOMS 363 / 680.
cplx faddeeva(cplx z) {
    constexpr double factor = 1.12837916709551257388;
    constexpr double rmaxreal = 0.5e154;
    const double xi = z.real(), yi = z.imag();
    const double xabs = std::abs(xi), yabs = std::abs(yi);
    if (xabs > rmaxreal || yabs > rmaxreal) throw OverflowError("faddeeva: argument too large");
    const double x = xabs / 6.3, y = yabs / 4.4;
    double qrho = x * x + y * y;
    const double xabsq = xabs * xabs;
    double xquad = xabsq - yabs * yabs;
    const double yquad = 2 * xabs * yabs;
    const bool a = qrho < 0.085264;
    double u = 0, v = 0, u2 = 0, v2 = 0;
    if (a) {
        qrho = (1 - 0.85 * y) * std::sqrt(qrho);
        const int n = int(std::lround(6 + 72 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j, ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = factor * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0, h2 = 0, qlambda = 0;
        int kapn = 0, nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = int(3 + (1442 / (26 * qrho + 77)));
        } else {
            qrho = (1 - y) * std::sqrt(1 - qrho);
            h = 1.88 * qrho;
            h2 = 2 * h;
            kapn = int(std::lround(7 + 34 * qrho));
            nu = int(std::lround(16 + 26 * qrho));
        }
        const bool b = h > 0;
        if (b) qlambda = std::pow(h2, kapn);
        double rx = 0, ry = 0, sx = 0, sy = 0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1;
            double tx = yabs + h + np1 * rx;
            const double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (b && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (h == 0) {
            u = factor * rx;
            v = factor * ry;
        } else {
            u = factor * sx;
            v = factor * sy;
        }
        if (yabs == 0) u = std::exp(-xabs * xabs);
    }
    if (yi < 0) {
        if (a) {
            u2 *= 2;
            v2 *= 2;
        } else {
            xquad = -xquad;
            if (xquad > 708.503061461606) throw OverflowError("faddeeva: result overflows");
            const double w1 = 2 * std::exp(xquad);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (xi > 0) v = -v;
    } else if (xi < 0) {
        v = -v;
    }
    return {u, v};
}

cplx erfi(cplx z) {
    if (z == cplx(0.0, 0.0)) return z;
    if (std::abs(z) <= 2.0) return erfi_series(z);
    // Reduce to Im z <= 0 by oddness, then
    // erfi(z) = -i [1 - exp(z^2) w(-z)] with -z in the closed upper half plane.
    if (z.imag() > 0) return -erfi(-z);
    const cplx w = faddeeva(-z);
    const cplx z2 = z * z;
    cplx e;
    if (z2.real() > 600.0) {
        const double logmag = z2.real() + std::log(std::abs(w));
        if (logmag > std::log(DBL_MAX) - 1.0)
            throw OverflowError("erfi: |erfi(z)| exceeds the double range");
        e = std::exp(z2 + std::log(w));
    } else {
        e = std::exp(z2) * w;
    }
    return cplx(0.0, -1.0) * (1.0 - e);
}

CompositeRule::CompositeRule(double a, double b, int panels) {
    if (panels < 1) throw DomainError("composite rule needs at least one panel");
    using rule = boost::math::quadrature::gauss<double, 16>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    const double h = (b - a) / panels;
    x.reserve(std::size_t(panels) * 16);
    w.reserve(std::size_t(panels) * 16);
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (std::size_t i = xs.size(); i-- > 0;) {
            x.push_back(c - 0.5 * h * xs[i]);
            w.push_back(0.5 * h * ws[i]);
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            x.push_back(c + 0.5 * h * xs[i]);
            w.push_back(0.5 * h * ws[i]);
        }
    }
}

double solve_bracket(const std::function<double(double)>& f, Bracket br, double xtol) {
    const double fa = f(br.lo), fb = f(br.hi);
    if (fa == 0.0) return br.lo;
    if (fb == 0.0) return br.hi;
    if ((fa > 0) == (fb > 0)) throw DomainError("solve_bracket: bracket does not change sign");
    auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol + 4 * DBL_EPSILON * std::abs(a); };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, br.lo, br.hi, fa, fb, tol, iters);
    return 0.5 * (r.first + r.second);
}

std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi,
                               int n_scan) {
    if (n_scan < 2) throw DomainError("find_roots: n_scan must be at least 2");
    if (!(hi > lo)) throw DomainError("find_roots: empty interval");
    const double h = (hi - lo) / n_scan;
    std::vector<double> xs(n_scan + 1), fs(n_scan + 1);
    double scale = 0.0;
    for (int i = 0; i <= n_scan; ++i) {
        xs[i] = i == n_scan ? hi : lo + i * h;
        fs[i] = f(xs[i]);
        scale = std::max(scale, std::abs(fs[i]));
    }
    if (scale == 0.0) scale = 1.0;
    std::vector<double> roots;
    for (int i = 0; i <= n_scan; ++i) {
        if (fs[i] == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (i < n_scan && fs[i + 1] != 0.0 && (fs[i] > 0) != (fs[i + 1] > 0))
            roots.push_back(solve_bracket(f, {xs[i], xs[i + 1]}, 1e-15 * std::max(1.0, std::abs(xs[i]))));
    }
    // Tangential roots: local minima of |f| without a sign change nearby.
    for (int i = 1; i < n_scan; ++i) {
        const double a0 = std::abs(fs[i - 1]), a1 = std::abs(fs[i]), a2 = std::abs(fs[i + 1]);
        if (fs[i] == 0.0 || !(a1 <= a0 && a1 <= a2)) continue;
        if ((fs[i - 1] > 0) != (fs[i] > 0) || (fs[i + 1] > 0) != (fs[i] > 0)) continue;
        const auto m = boost::math::tools::brent_find_minima(
            [&f](double x) { return std::abs(f(x)); }, xs[i - 1], xs[i + 1], 52);
        const double xm = m.first;
        if (std::abs(f(xm)) <= 1e-12 * scale) roots.push_back(xm);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || std::abs(r - out.back()) > 1e-12 * std::max(1.0, std::abs(r))) out.push_back(r);
    return out;
}

double hermite_function(int n, double u) {
    if (n < 0 || n > 200) throw DomainError("hermite_function: n must lie in [0, 200]");
    double p0 = std::pow(pi, -0.25) * std::exp(-0.5 * u * u);
    if (n == 0) return p0;
    double p1 = std::sqrt(2.0) * u * p0;
    for (int k = 1; k < n; ++k) {
        const double p2 = std::sqrt(2.0 / (k + 1)) * u * p1 - std::sqrt(double(k) / (k + 1)) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double hermite_density(int n, double u) {
    const double p = hermite_function(n, u);
    return p * p;
}

double integrate_samples(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("integrate_samples: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
        const double hs = h0 + h1;
        s += hs / 6.0 *
             (y[i] * (2.0 - h1 / h0) + y[i + 1] * hs * hs / (h0 * h1) + y[i + 2] * (2.0 - h0 / h1));
    }
    if (i + 1 < n) s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    return s;
}

}  // namespace dwell::numerics
