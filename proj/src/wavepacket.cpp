#include "dwell/wavepacket.hpp"

#include <cmath>

namespace dwell {

MomentumWavepacket::MomentumWavepacket(Amplitude amplitude, Support support, double k_lo,
                                       double k_hi, double k_scale, double x_center,
                                       bool normalize)
    : amp_(std::move(amplitude)),
      support_(support),
      k_lo_(k_lo),
      k_hi_(k_hi),
      k_scale_(k_scale),
      x_center_(x_center) {
    if (!(k_hi > k_lo)) throw DomainError("wavepacket: empty k-window");
    if (!(k_scale > 0.0)) throw DomainError("wavepacket: k_scale must be positive");
    if (support == Support::positive && k_lo < 0.0)
        throw DomainError("wavepacket: positive support needs k_lo >= 0");
    if (normalize) {
        const double n2 = norm2();
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("wavepacket: amplitude has zero norm");
        norm_factor_ = 1.0 / std::sqrt(n2);
    }
}

MomentumWavepacket MomentumWavepacket::filtered_gaussian(const FilteredGaussianParams& p) {
    if (!(p.dk > 0.0)) throw DomainError("wavepacket: dk must be positive");
    if (!(p.k0 > 0.0)) throw DomainError("wavepacket: k0 must be positive");
    if (p.alpha < 0.0) throw DomainError("wavepacket: alpha must be non-negative");
    const double k0 = p.k0, dk = p.dk, alpha = p.alpha, x0 = p.x0;
    auto amp = [=](double k) -> cplx {
        if (k <= 0.0) return 0.0;
        const double filter = alpha > 0.0 ? -std::expm1(-alpha * k * k) : 1.0;
        const double d = k - k0;
        return filter * std::exp(-d * d / (4.0 * dk * dk)) * std::polar(1.0, -k * x0);
    };
    const double lo = std::max(0.0, k0 - 10.0 * dk), hi = k0 + 10.0 * dk;
    double scale = dk;
    if (alpha > 0.0) scale = std::min(scale, 1.0 / std::sqrt(alpha));
    MomentumWavepacket w(amp, Support::positive, lo, hi, scale, x0, true);
    w.params_ = p;
    return w;
}

cplx MomentumWavepacket::operator()(double k) const {
    if (support_ == Support::positive && k <= 0.0) return 0.0;
    return norm_factor_ * amp_(k);
}

numerics::CompositeRule MomentumWavepacket::rule(double phase_slope) const {
    const double w = k_hi_ - k_lo_;
    const double by_scale = 6.0 * w / k_scale_;
    const double by_phase = (std::abs(phase_slope) + extra_slope_) * w / 6.0;
    const int panels = int(std::ceil(std::max({by_scale, by_phase, 4.0})));
    return numerics::CompositeRule(k_lo_, k_hi_, panels);
}

double MomentumWavepacket::norm2() const {
    numerics::QuadratureSpec spec{1e-15, 1e-13, 20000};
    auto r = numerics::integrate([this](double k) { return std::norm(norm_factor_ * amp_(k)); },
                                 k_lo_, k_hi_, spec);
    return r.value;
}

MomentumWavepacket MomentumWavepacket::evolved(double t, const UnitSystem& units) const {
    const double nu = units.nu();
    Amplitude a = amp_;
    auto amp = [a, nu, t](double k) { return a(k) * std::polar(1.0, -0.5 * nu * k * k * t); };
    MomentumWavepacket w(amp, support_, k_lo_, k_hi_, k_scale_, x_center_, false);
    w.norm_factor_ = norm_factor_;
    w.params_ = params_;
    // the quadratic phase adds a k-slope of at most nu*k_max*|t|
    w.extra_slope_ = extra_slope_ + nu * std::max(std::abs(k_lo_), std::abs(k_hi_)) * std::abs(t);
    return w;
}

MomentumWavepacket MomentumWavepacket::scaled(cplx c) const {
    MomentumWavepacket w = *this;
    Amplitude a = amp_;
    w.amp_ = [a, c](double k) { return c * a(k); };
    return w;
}

MomentumWavepacket MomentumWavepacket::combine(cplx a, const MomentumWavepacket& psi, cplx b,
                                               const MomentumWavepacket& phi) {
    auto amp = [a, psi, b, phi](double k) { return a * psi(k) + b * phi(k); };
    const Support s = (psi.support() == Support::positive && phi.support() == Support::positive)
                          ? Support::positive
                          : Support::full_line;
    const double dx = std::abs(psi.x_center() - phi.x_center());
    const double scale = std::min(psi.k_scale(), phi.k_scale());
    MomentumWavepacket w(amp, s, std::min(psi.k_lo(), phi.k_lo()), std::max(psi.k_hi(), phi.k_hi()),
                         scale, psi.x_center(), false);
    w.extra_slope_ = std::max(psi.extra_slope_, phi.extra_slope_) + dx;
    return w;
}

cplx MomentumWavepacket::inner(const MomentumWavepacket& other) const {
    const double lo = std::max(k_lo_, other.k_lo_), hi = std::min(k_hi_, other.k_hi_);
    if (!(hi > lo)) return 0.0;
    const double slope = std::abs(x_center_ - other.x_center_) + extra_slope_ + other.extra_slope_;
    const double scale = std::min(k_scale_, other.k_scale_);
    const int panels = int(std::ceil(std::max({6.0 * (hi - lo) / scale, slope * (hi - lo) / 6.0, 4.0})));
    numerics::CompositeRule r(lo, hi, panels);
    cplx s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::conj((*this)(r.x[i])) * other(r.x[i]);
    return s;
}

namespace numerics {

namespace {
constexpr double inv_sqrt_2pi = 0.39894228040143267794;

double phase_slope(const MomentumWavepacket& psi, double x, double t, const UnitSystem& u) {
    const double kmax = std::max(std::abs(psi.k_lo()), std::abs(psi.k_hi()));
    return std::abs(x - psi.x_center()) + u.nu() * kmax * std::abs(t);
}
}  // namespace

cplx propagate_free(const MomentumWavepacket& psi, double x, double t, const UnitSystem& units) {
    const auto r = psi.rule(phase_slope(psi, x, t, units));
    const double nu = units.nu();
    cplx s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double k = r.x[i];
        s += r.w[i] * psi(k) * std::polar(1.0, k * x - 0.5 * nu * k * k * t);
    }
    return inv_sqrt_2pi * s;
}

cplx propagate_free_adaptive(const MomentumWavepacket& psi, double x, double t,
                             const UnitSystem& units, double rel_tol) {
    const double nu = units.nu();
    auto f = [&](double k) { return psi(k) * std::polar(1.0, k * x - 0.5 * nu * k * k * t); };
    QuadratureSpec spec{1e-15, rel_tol, 100000};
    return inv_sqrt_2pi * integrate(f, psi.k_lo(), psi.k_hi(), spec).value;
}

FreePropagator::FreePropagator(const MomentumWavepacket& psi, double max_dx, double max_t,
                               const UnitSystem& units)
    : nu_(units.nu()) {
    const double kmax = std::max(std::abs(psi.k_lo()), std::abs(psi.k_hi()));
    const auto r = psi.rule(std::abs(max_dx) + nu_ * kmax * std::abs(max_t));
    k_ = r.x;
    a_.resize(k_.size());
    for (std::size_t i = 0; i < k_.size(); ++i) a_[i] = inv_sqrt_2pi * r.w[i] * psi(k_[i]);
}

cplx FreePropagator::value(double x, double t) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i)
        s += a_[i] * std::polar(1.0, k_[i] * x - 0.5 * nu_ * k_[i] * k_[i] * t);
    return s;
}

std::pair<cplx, cplx> FreePropagator::value_and_dx(double x, double t) const {
    cplx s = 0.0, d = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i) {
        const cplx term = a_[i] * std::polar(1.0, k_[i] * x - 0.5 * nu_ * k_[i] * k_[i] * t);
        s += term;
        d += cplx(0.0, k_[i]) * term;
    }
    return {s, d};
}

}  // namespace numerics
}  // namespace dwell
