#include "dwell/ffcf.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <memory>
#include <tuple>

namespace dwell {

using numerics::pi;

namespace {

const cplx sqrt_i = std::polar(1.0, 0.25 * pi);

void require_positive_k(double k) {
    if (!(k > 0.0)) throw DomainError("flux correlation: k must be positive");
}

// 1 - 3(1 + cos^2 q)/q^2 + 3 sin(2q)/q^3
double third_bracket(double q) {
    if (std::abs(q) < 0.5) {
        const double q2 = q * q;
        return q2 * (-1.0 / 5 + q2 * (2.0 / 35 + q2 * (-1.0 / 189 + q2 * (2.0 / 7425 +
               q2 * (-2.0 / 225225 + q2 * 4.0 / 19348875)))));
    }
    const double c = std::cos(q);
    return 1.0 - 3.0 * (1.0 + c * c) / (q * q) + 3.0 * std::sin(2.0 * q) / (q * q * q);
}

double sinc(double q) { return q == 0.0 ? 1.0 : std::sin(q) / q; }

double mean_k(const MomentumWavepacket& psi) {
    const auto r = psi.rule();
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi.density(r.x[i]);
        s0 += d;
        s1 += d * r.x[i];
    }
    return s1 / s0;
}

}  // namespace

StationaryMoments pm_free_moments(double k, const Region& D, const UnitSystem& units) {
    require_positive_k(k);
    const double L = D.length(), q = k * L;
    const double T0 = units.mass * L / (units.hbar * k);
    const double s = sinc(q);
    return {T0, T0 * T0 * (1.0 + s * s), T0 * T0 * T0 * third_bracket(q),
            T0 * T0 * T0 * (1.0 + 3.0 * s * s)};
}

StationaryMoments packet_stationary_moments(const MomentumWavepacket& psi, const Region& D,
                                            const UnitSystem& units) {
    const auto r = psi.rule();
    StationaryMoments acc{0, 0, 0, 0};
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi.density(r.x[i]);
        if (d == 0.0) continue;
        const auto m = pm_free_moments(r.x[i], D, units);
        acc.order1 += d * m.order1;
        acc.order2 += d * m.order2;
        acc.order3 += d * m.order3;
        acc.order3_dwell += d * m.order3_dwell;
    }
    return acc;
}

StationaryIdentity pm_stationary_identity_check(const PiecewisePotential& pot, const Region& D, double k) {
    require_positive_k(k);
    const auto M = onshell_dwell_matrix(pot, D, k).m;
    const auto dec = dwell_eigen_decomposition(pot, D, k);
    const double wp = std::norm(dec.v_plus(0)), wm = std::norm(dec.v_minus(0));
    return {M(0, 0).real(), (M * M)(0, 0).real(), dec.t_plus * wp + dec.t_minus * wm,
            dec.t_plus * dec.t_plus * wp + dec.t_minus * dec.t_minus * wm};
}

cplx g_kernel(double x, double tau, const UnitSystem& units) {
    if (!(tau > 0.0)) throw DomainError("g kernel: tau must be positive");
    const double s = units.mass / (2.0 * units.hbar * tau);
    return -sqrt_i * std::sqrt(pi / s) * std::polar(1.0, s * x * x) +
           cplx(0.0, pi * x) * numerics::erfi(sqrt_i * std::sqrt(s) * x);
}

cplx g_kernel_d1(double k, double c, double tau, const UnitSystem& units) {
    if (!(tau > 0.0)) throw DomainError("g kernel: tau must be positive");
    const double v = units.nu() * k, x = v * tau + c;
    const double s = units.mass / (2.0 * units.hbar * tau);
    return cplx(0.0, pi * v) * numerics::erfi(sqrt_i * std::sqrt(s) * x) -
           0.5 * sqrt_i * std::sqrt(pi / s) / tau * std::polar(1.0, s * x * x);
}

cplx g_kernel_d2(double k, double c, double tau, const UnitSystem& units) {
    if (!(tau > 0.0)) throw DomainError("g kernel: tau must be positive");
    const double v = units.nu() * k, x = v * tau + c;
    const double s = units.mass / (2.0 * units.hbar * tau);
    const double u = 0.5 * v - 0.5 * c / tau;
    return cplx(0.0, 2.0) * sqrt_i * std::sqrt(pi * s) * std::polar(1.0, s * x * x) *
           cplx(u * u, -1.0 / (8.0 * s * tau * tau));
}

cplx g_kernel_d2_fd(double k, double c, double tau, const UnitSystem& units) {
    const double v = units.nu() * k;
    auto G = [&](double t) { return g_kernel(v * t + c, t, units); };
    auto second = [&](double h) { return (G(tau + h) - 2.0 * G(tau) + G(tau - h)) / (h * h); };
    const double h = 1e-4 * tau;
    return (4.0 * second(0.5 * h) - second(h)) / 3.0;
}

FreeFfcf::FreeFfcf(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units,
                   KernelDerivative derivative, double tau_min)
    : psi_(psi), D_(D), units_(units), derivative_(derivative), tau_min_(tau_min) {
    if (psi.support() != Support::positive)
        throw DomainError("flux correlation: packet must have positive momenta only");
    if (!(tau_min > 0.0)) throw DomainError("flux correlation: tau_min must be positive");
    const double L = D.length(), T = units.mass * L / units.hbar;
    const auto r = psi.rule();
    double W = 0.0, total = 0.0;
    std::vector<double> tail(r.x.size());
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi.density(r.x[i]);
        W += d * units.mass / (2.0 * pi * units.hbar * r.x[i]);
        tail[i] = d * (T / r.x[i]) * (T / r.x[i]);
        total += tail[i];
    }
    a_ = 0.5 * std::sqrt(pi * units.hbar / units.mass) * W;
    crossing_ = T / mean_k(psi);
    // slowest wavenumber with non-negligible weight in the second moment
    double acc = 0.0, k_c = r.x.front();
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        acc += tail[i];
        if (acc > 1e-10 * total) {
            k_c = r.x[i];
            break;
        }
    }
    // self-correlation rings for ~ m / (hbar <k> sigma_k) before dephasing
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi.density(r.x[i]);
        s0 += d;
        s1 += d * r.x[i];
        s2 += d * r.x[i] * r.x[i];
    }
    const double kbar = s1 / s0, sigma = std::sqrt(std::max(s2 / s0 - kbar * kbar, 0.0));
    const double coherence = sigma > 0.0 ? 9.0 / (units.nu() * kbar * sigma) : 0.0;
    tau_max_ = std::min(std::max(2.0 * T / k_c, coherence), 1e3 * std::max(crossing_, coherence));
}

const FreeFfcf::Nodes& FreeFfcf::nodes_for(double tau) const {
    const double slope = units_.nu() * psi_.k_hi() * tau + D_.length();
    const int b = std::max(0, int(std::ceil(std::log2(std::max(slope, 1.0)))));
    if (b > 24) throw NumericalError("flux correlation: tau beyond the reach of the k quadrature");
    auto it = cache_.find(b);
    if (it != cache_.end()) return it->second;
    const auto r = psi_.rule(std::ldexp(1.0, b));
    Nodes n;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi_.density(r.x[i]);
        if (d == 0.0) continue;
        n.k.push_back(r.x[i]);
        n.w.push_back(d * units_.mass / (2.0 * pi * units_.hbar * r.x[i]));
    }
    return cache_.emplace(b, std::move(n)).first->second;
}

double FreeFfcf::operator()(double tau) const {
    if (!(tau > 0.0)) throw DomainError("flux correlation: tau must be positive");
    const auto& n = nodes_for(tau);
    const double L = D_.length();
    double sum = 0.0;
    if (derivative_ == KernelDerivative::finite_difference) {
        for (std::size_t i = 0; i < n.k.size(); ++i) {
            const double k = n.k[i];
            const cplx b = 2.0 * g_kernel_d2_fd(k, 0.0, tau, units_) - g_kernel_d2_fd(k, -L, tau, units_) -
                           g_kernel_d2_fd(k, L, tau, units_);
            sum += n.w[i] * b.real();
        }
        return sum;
    }
    const double s = units_.mass / (2.0 * units_.hbar * tau);
    const cplx pref = cplx(0.0, 2.0) * sqrt_i * std::sqrt(pi * s);
    const double im = -1.0 / (8.0 * s * tau * tau);
    // exp(i s x^2) = exp(i s c^2) exp(i (hbar k^2 tau / 2m + k c)); the large
    // k-independent phase is applied once
    const cplx edge = std::polar(1.0, s * L * L);
    for (std::size_t i = 0; i < n.k.size(); ++i) {
        const double k = n.k[i], v = units_.nu() * k;
        const double th = 0.5 * v * k * tau, u0 = 0.5 * v, ul = 0.5 * L / tau;
        const cplx self = std::polar(2.0, th) * cplx(u0 * u0, im);
        const cplx left = std::polar(1.0, th - k * L) * cplx((u0 + ul) * (u0 + ul), im);
        const cplx right = std::polar(1.0, th + k * L) * cplx((u0 - ul) * (u0 - ul), im);
        sum += n.w[i] * (pref * (self - edge * (left + right))).real();
    }
    return sum;
}

std::vector<FfcfSample> FreeFfcf::sample(const std::vector<double>& taus) const {
    std::vector<FfcfSample> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back({t, (*this)(t), std::nullopt});
    return out;
}

double FreeFfcf::first_derivative(double tau) const {
    const auto& n = nodes_for(tau);
    const double L = D_.length();
    double sum = 0.0;
    for (std::size_t i = 0; i < n.k.size(); ++i) {
        const double k = n.k[i];
        const cplx b = 2.0 * g_kernel_d1(k, 0.0, tau, units_) - g_kernel_d1(k, -L, tau, units_) -
                       g_kernel_d1(k, L, tau, units_);
        sum += n.w[i] * b.real();
    }
    return sum;
}

namespace {

double integrate_tau(const std::function<double(double)>& f, double lo, double hi, double scale,
                     double rel_tol) {
    std::vector<double> br{lo};
    while (br.back() * 2.0 < hi) br.push_back(br.back() * 2.0);
    br.push_back(hi);
    const numerics::QuadratureSpec spec{std::max(1e-300, rel_tol * scale / double(br.size())), rel_tol, 4000};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) total += numerics::integrate(f, br[i], br[i + 1], spec).value;
    return total;
}

}  // namespace

double FreeFfcf::normalization(double rel_tol) const {
    const double split = std::max(tau_min_, 1e-2 * crossing_);
    const double lower = first_derivative(split);
    const double upper = integrate_tau([this](double t) { return (*this)(t); }, split, tau_max_,
                                       std::abs(lower), rel_tol);
    return upper + lower;
}

double FreeFfcf::moment(int n, double rel_tol) const {
    if (n < 1) throw DomainError("flux correlation: moment order must be at least 1");
    const auto sm = packet_stationary_moments(psi_, D_, units_);
    const double scale = n == 1 ? sm.order1 : n == 2 ? sm.order2 : std::abs(sm.order3_dwell);
    const double upper = integrate_tau([this, n](double t) { return std::pow(t, n) * (*this)(t); }, tau_min_,
                                       tau_max_, scale, rel_tol);
    const double p = n - 0.5;
    return upper + a_ * std::pow(tau_min_, p) / p;
}

double ffcf_free(const MomentumWavepacket& psi, const Region& D, double tau, const UnitSystem& units,
                 KernelDerivative derivative) {
    return FreeFfcf(psi, D, units, derivative)(tau);
}

FfcfMoments ffcf_moments(const std::vector<FfcfSample>& samples) {
    if (samples.size() < 3) throw DomainError("flux correlation moments: need at least three samples");
    auto s = samples;
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
    std::vector<double> t, y1, y2;
    for (const auto& p : s) {
        t.push_back(p.tau);
        y1.push_back(p.tau * p.value);
        y2.push_back(p.tau * p.tau * p.value);
    }
    FfcfMoments m;
    m.m1 = numerics::integrate_samples(t, y1);
    m.m2 = numerics::integrate_samples(t, y2);
    const double tail = std::abs(y2.back()) * t.back();
    if (tail > 1e-6 * std::abs(m.m2))
        m.warnings.push_back("correlation has not decayed at tau_max = " + numerics::detail::fmt_sci(t.back()));
    return m;
}

HumpSummary ffcf_hump(const std::vector<FfcfSample>& samples, double tau_from) {
    std::size_t best = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].tau >= tau_from && (best == samples.size() || samples[i].value > samples[best].value))
            best = i;
    if (best == samples.size() || !(samples[best].value > 0.0))
        throw NumericalError("flux correlation: no positive hump beyond tau = " + numerics::detail::fmt_sci(tau_from));
    std::size_t lo = best, hi = best;
    while (lo > 0 && samples[lo - 1].value > 0.0) --lo;
    while (hi + 1 < samples.size() && samples[hi + 1].value > 0.0) ++hi;
    std::vector<double> t, c, tc;
    for (std::size_t i = lo; i <= hi; ++i) {
        t.push_back(samples[i].tau);
        c.push_back(samples[i].value);
        tc.push_back(samples[i].tau * samples[i].value);
    }
    const double mass = numerics::integrate_samples(t, c);
    return {samples[lo].tau, samples[hi].tau, samples[best].tau, samples[best].value,
            numerics::integrate_samples(t, tc) / mass};
}

double current_density(const MomentumWavepacket& psi, double x, double t, const UnitSystem& units) {
    const numerics::FreePropagator prop(psi, std::abs(x - psi.x_center()), t, units);
    const auto [v, d] = prop.value_and_dx(x, t);
    return units.nu() * (std::conj(v) * d).imag();
}

cplx flux_matrix_element(const MomentumWavepacket& psi, const MomentumWavepacket& phi, double x, double t,
                         const UnitSystem& units) {
    const numerics::FreePropagator pa(psi, std::abs(x - psi.x_center()), t, units);
    const numerics::FreePropagator pb(phi, std::abs(x - phi.x_center()), t, units);
    const auto [a, da] = pa.value_and_dx(x, t);
    const auto [b, db] = pb.value_and_dx(x, t);
    return (std::conj(a) * db - std::conj(da) * b) * (units.nu() / cplx(0.0, 2.0));
}

namespace {

// J at x1 and x2 on the grid t0 + i*step. The free phases advance by a fixed
// factor per step and are recomputed exactly every 256 steps.
std::pair<std::vector<double>, std::vector<double>> boundary_currents(const MomentumWavepacket& psi,
                                                                      const Region& D, double t0, double step,
                                                                      std::size_t n, const UnitSystem& units) {
    const double nu = units.nu(), t1 = t0 + step * double(n - 1);
    const double kmax = std::max(std::abs(psi.k_lo()), std::abs(psi.k_hi()));
    const double reach = std::max(std::abs(D.x1 - psi.x_center()), std::abs(D.x2 - psi.x_center()));
    const auto r = psi.rule(reach + nu * kmax * std::max(std::abs(t0), std::abs(t1)));
    const std::size_t m = r.x.size();
    std::vector<cplx> b1(m), b2(m), rot(m), e(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double k = r.x[i];
        const cplx a = r.w[i] * psi(k) / std::sqrt(2.0 * pi);
        b1[i] = a * std::polar(1.0, k * D.x1);
        b2[i] = a * std::polar(1.0, k * D.x2);
        rot[i] = std::polar(1.0, -0.5 * nu * k * k * step);
    }
    std::vector<double> J1(n), J2(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j % 256 == 0) {
            const double t = t0 + step * double(j);
            for (std::size_t i = 0; i < m; ++i) e[i] = std::polar(1.0, -0.5 * nu * r.x[i] * r.x[i] * t);
        } else {
            for (std::size_t i = 0; i < m; ++i) e[i] *= rot[i];
        }
        cplx v1 = 0.0, d1 = 0.0, v2 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const cplx p1 = b1[i] * e[i], p2 = b2[i] * e[i];
            v1 += p1;
            d1 += r.x[i] * p1;
            v2 += p2;
            d2 += r.x[i] * p2;
        }
        // psi' = sum i k term
        J1[j] = nu * (std::conj(v1) * cplx(0.0, 1.0) * d1).imag();
        J2[j] = nu * (std::conj(v2) * cplx(0.0, 1.0) * d2).imag();
    }
    return {std::move(J1), std::move(J2)};
}

}  // namespace

ZerothOrderFfcf::ZerothOrderFfcf(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units,
                                 double current_floor) {
    if (psi.support() != Support::positive)
        throw DomainError("zeroth-order correlation: packet must have positive momenta only");
    const double kbar = mean_k(psi), nu = units.nu();
    dt_ = 0.02 / (nu * kbar * psi.k_scale());
    // slowest wavenumber whose current can exceed the floor
    const auto r = psi.rule();
    double k_c = psi.k_hi();
    for (std::size_t i = 0; i < r.x.size(); ++i)
        if (psi.density(r.x[i]) * nu * r.x[i] > 1e-2 * current_floor) {
            k_c = std::max(r.x[i], 1e-12);
            break;
        }
    const double width = 10.0 / psi.k_scale();
    const double xc = psi.x_center();
    const double speed_hi = nu * psi.k_hi(), speed_lo = nu * k_c;
    double ta = std::min((D.x1 - xc - width) / speed_hi, (D.x1 - xc - width) / speed_lo);
    double tb = std::max((D.x2 - xc + width) / speed_lo, (D.x2 - xc + width) / speed_hi);
    ta = std::min(ta, 0.0);
    // coarse scan for the interval where either current exceeds the floor
    const double coarse_dt = 32.0 * dt_;
    const auto nc = std::size_t(std::ceil((tb - ta) / coarse_dt)) + 1;
    const auto [c1, c2] = boundary_currents(psi, D, ta, coarse_dt, nc, units);
    double first = tb, last = ta;
    for (std::size_t i = 0; i < nc; ++i)
        if (std::max(std::abs(c1[i]), std::abs(c2[i])) >= current_floor) {
            first = std::min(first, ta + coarse_dt * double(i));
            last = std::max(last, ta + coarse_dt * double(i));
        }
    if (!(last >= first)) throw NumericalError("zeroth-order correlation: current never exceeds the floor");
    first -= coarse_dt;
    last += coarse_dt;
    const auto n = std::size_t(std::ceil((last - first) / dt_)) + 1;
    if (n > 4000000) throw NumericalError("zeroth-order correlation: time grid too large");
    t0_ = first;
    std::tie(J1_, J2_) = boundary_currents(psi, D, t0_, dt_, n, units);
}

std::vector<double> ZerothOrderFfcf::lag_values() const {
    if (!lags_.empty()) return lags_;
    const std::size_t n = J1_.size();
    lags_.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i + j < n; ++i)
            s += J2_[i + j] * J1_[i] + J1_[i + j] * J2_[i] - J1_[i + j] * J1_[i] - J2_[i + j] * J2_[i];
        lags_[j] = s * dt_;
    }
    return lags_;
}

double ZerothOrderFfcf::operator()(double tau) const {
    if (tau < 0.0) throw DomainError("zeroth-order correlation: tau must be non-negative");
    const double end = t0_ + dt_ * double(J1_.size() - 1);
    using spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    const spline s1(J1_.begin(), J1_.end(), t0_, dt_), s2(J2_.begin(), J2_.end(), t0_, dt_);
    double sum = 0.0;
    for (std::size_t i = 0; i < J1_.size(); ++i) {
        const double t = t0_ + dt_ * double(i) + tau;
        if (t > end) break;
        const double a = s1(t), b = s2(t);
        sum += b * J1_[i] + a * J2_[i] - a * J1_[i] - b * J2_[i];
    }
    return sum * dt_;
}

double ZerothOrderFfcf::moment(int n) const {
    if (n < 0 || n > 2) throw DomainError("zeroth-order correlation: moment order must be 0, 1 or 2");
    const auto c = lag_values();
    std::vector<double> t(c.size()), y(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        t[j] = dt_ * double(j);
        y[j] = std::pow(t[j], n) * c[j];
    }
    return numerics::integrate_samples(t, y);
}

double ffcf_zeroth_approx(const MomentumWavepacket& psi, const Region& D, double tau, const UnitSystem& units) {
    return ZerothOrderFfcf(psi, D, units)(tau);
}

cplx cross_flux_from_diagonal(const MomentumWavepacket& psi, const MomentumWavepacket& psiQ, double x, double t,
                              const UnitSystem& units) {
    const double scale = std::sqrt(psi.inner(psi).real() * psiQ.inner(psiQ).real());
    if (std::abs(psi.inner(psiQ)) > 1e-10 * std::max(scale, 1e-300))
        throw DomainError("cross flux: states are not orthogonal");
    const cplx I(0.0, 1.0);
    const double j1 = current_density(MomentumWavepacket::combine(1.0, psi, 1.0, psiQ), x, t, units);
    const double j2 = current_density(MomentumWavepacket::combine(1.0, psi, I, psiQ), x, t, units);
    const double j3 = current_density(MomentumWavepacket::combine(1.0, psi, -I, psiQ), x, t, units);
    return 0.5 * j1 - 0.25 * j2 - 0.25 * j3 + 0.25 * I * j3 - 0.25 * I * j2;
}

std::vector<MomentumWavepacket> gram_schmidt_partners(const MomentumWavepacket& psi, int count) {
    if (count < 1) throw DomainError("Gram-Schmidt: count must be positive");
    const int n = count + 1;
    const double kbar = mean_k(psi), scale = psi.k_scale();
    auto hermite = [n, kbar, scale](double k) {
        std::vector<double> h(n);
        const double u = (k - kbar) / scale;
        h[0] = 1.0;
        if (n > 1) h[1] = u;
        for (int j = 1; j + 1 < n; ++j) h[j + 1] = u * h[j] - j * h[j - 1];
        return h;
    };
    const auto r = psi.rule();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double d = r.w[i] * psi.density(r.x[i]);
        const auto h = hermite(r.x[i]);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) G(a, b) += d * h[a] * h[b];
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw NumericalError("Gram-Schmidt: Gram matrix not positive definite");
    const Eigen::MatrixXd C = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
    std::vector<MomentumWavepacket> out;
    for (int j = 1; j < n; ++j) {
        std::vector<double> coef(n);
        for (int a = 0; a < n; ++a) coef[a] = C(j, a);
        auto amp = [psi, coef, hermite](double k) {
            const auto h = hermite(k);
            double p = 0.0;
            for (std::size_t a = 0; a < coef.size(); ++a) p += coef[a] * h[a];
            return psi(k) * p;
        };
        out.emplace_back(amp, psi.support(), psi.k_lo(), psi.k_hi(), psi.k_scale() / std::sqrt(double(n)),
                         psi.x_center(), false);
    }
    return out;
}

}  // namespace dwell
