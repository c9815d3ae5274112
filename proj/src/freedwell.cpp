#include "dwell/freedwell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwell {

using numerics::pi;

Region::Region(double a, double b) : x1(a), x2(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
        throw DomainError("region: need finite x1 < x2");
}

namespace {

void require_positive_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("wavenumber must be positive");
}

double sinc(double q) {
    if (std::abs(q) < 1e-4) return 1.0 - q * q / 6.0;
    return std::sin(q) / q;
}

// (1 - sin q / q) / q without cancellation
double one_minus_sinc_over_q(double q) {
    if (std::abs(q) < 0.1) {
        const double q2 = q * q;
        return q * (1.0 / 6 - q2 * (1.0 / 120 - q2 * (1.0 / 5040 - q2 / 362880.0)));
    }
    return (1.0 - std::sin(q) / q) / q;
}

double d_one_minus_sinc_over_q(double q) {
    if (std::abs(q) < 0.1) {
        const double q2 = q * q;
        return 1.0 / 6 - q2 * (3.0 / 120 - q2 * (5.0 / 5040 - 7.0 * q2 / 362880.0));
    }
    return -1.0 / (q * q) - (std::cos(q) / (q * q) - 2.0 * std::sin(q) / (q * q * q));
}

}  // namespace

std::pair<double, double> OnShellDwellMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    const auto& ev = es.eigenvalues();
    return {ev(1), ev(0)};
}

DwellEigenpair free_eigenvalues(double k, const Region& D, const UnitSystem& u) {
    require_positive_k(k);
    const double L = D.length();
    const double t = u.mass * L / (u.hbar * k);
    const double s = sinc(k * L);
    const double tm = u.mass * L * L / u.hbar * one_minus_sinc_over_q(k * L);
    return {k, t * (1.0 + s), tm, std::polar(1.0, k * (D.x1 + D.x2))};
}

std::pair<Eigen::Vector2cd, Eigen::Vector2cd> free_eigenvectors(double k, const Region& D) {
    require_positive_k(k);
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd p, m;
    p << r * std::polar(1.0, -k * D.x1), r * std::polar(1.0, k * D.x2);
    m << r * std::polar(1.0, -k * D.x1), -r * std::polar(1.0, k * D.x2);
    return {p, m};
}

OnShellDwellMatrix free_onshell_matrix(double k, const Region& D, const UnitSystem& u) {
    require_positive_k(k);
    const double L = D.length();
    const double diag = u.mass * L / (u.hbar * k);
    const cplx off = (u.mass / (u.hbar * k)) * std::polar(1.0, -k * (D.x1 + D.x2)) * (L * sinc(k * L));
    OnShellDwellMatrix r{k, Eigen::Matrix2cd()};
    r.m << diag, off, std::conj(off), diag;
    return r;
}

// ---------------------------------------------------------------------------

FreeDwellSpectrum::FreeDwellSpectrum(const MomentumWavepacket& psi, const Region& D,
                                     const UnitSystem& u)
    : psi_(psi), L_(D.length()), T0_(u.mass * D.length() * D.length() / u.hbar) {
    if (psi.support() != Support::positive)
        throw DomainError("dwell distribution: packet must have positive-momentum support");
    // k-window where |psi~|^2 exceeds 1e-12 of its peak
    const int n = 20000;
    std::vector<double> ks(n + 1), ds(n + 1);
    double peak = 0.0;
    for (int i = 0; i <= n; ++i) {
        ks[i] = psi.k_lo() + (psi.k_hi() - psi.k_lo()) * i / n;
        ds[i] = ks[i] > 0.0 ? psi.density(ks[i]) : 0.0;
        peak = std::max(peak, ds[i]);
    }
    int ia = -1, ib = -1;
    for (int i = 0; i <= n; ++i)
        if (ds[i] > 1e-12 * peak) {
            if (ia < 0) ia = i;
            ib = i;
        }
    if (ia < 0) throw DomainError("dwell distribution: empty root-scan window");
    const double ka = ks[std::max(ia - 1, 0)] > 0.0 ? ks[std::max(ia - 1, 0)] : ks[ia];
    const double kb = ks[std::min(ib + 1, n)];
    const double qa = ka * L_, qb = kb * L_;

    auto G = [](double q) { return q * std::sin(q / 2) + 2 * std::cos(q / 2); };
    auto H = [](double q) { return std::sin(q / 2) - (q / 2) * std::cos(q / 2); };
    for (int branch : {+1, -1}) {
        std::vector<double> crit;
        if (branch > 0) {
            for (int m = 1; (2 * m - 1) * pi < qb; ++m) {
                crit.push_back(2 * m * pi);
                crit.push_back(numerics::solve_bracket(G, {(2 * m - 1) * pi, 2 * m * pi}));
            }
        } else {
            for (int m = 0; 2 * m * pi < qb; ++m) {
                crit.push_back((2 * m + 1) * pi);
                if (m >= 1) crit.push_back(numerics::solve_bracket(H, {2 * m * pi, (2 * m + 1) * pi}));
            }
        }
        std::vector<double> cuts{qa};
        std::sort(crit.begin(), crit.end());
        for (double c : crit)
            if (c > qa && c < qb) {
                cuts.push_back(c);
                singular_.push_back(t_of_q(branch, c));
                singular_weight_.push_back(psi.density(c / L_));
            }
        cuts.push_back(qb);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            pieces_.push_back({branch, cuts[i], cuts[i + 1], t_of_q(branch, cuts[i]), t_of_q(branch, cuts[i + 1])});
    }
    tau_min_ = 1e300;
    tau_max_ = 0.0;
    for (const auto& p : pieces_) {
        tau_min_ = std::min({tau_min_, p.t_lo, p.t_hi});
        tau_max_ = std::max({tau_max_, p.t_lo, p.t_hi});
    }
    // keep the singular list sorted, weights in step
    std::vector<std::size_t> idx(singular_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return singular_[a] < singular_[b]; });
    std::vector<double> s, w;
    for (auto i : idx) {
        s.push_back(singular_[i]);
        w.push_back(singular_weight_[i]);
    }
    singular_ = s;
    singular_weight_ = w;
}

double FreeDwellSpectrum::t_of_q(int branch, double q) const {
    if (branch > 0) return T0_ * (1.0 + sinc(q)) / q;
    return T0_ * one_minus_sinc_over_q(q);
}

double FreeDwellSpectrum::dt_dq(int branch, double q) const {
    if (branch > 0) return T0_ * (-1.0 / (q * q) + std::cos(q) / (q * q) - 2.0 * std::sin(q) / (q * q * q));
    return T0_ * d_one_minus_sinc_over_q(q);
}

double FreeDwellSpectrum::density(double tau) const {
    if (!(tau > 0.0)) return 0.0;
    double s = 0.0;
    for (const auto& p : pieces_) {
        const double lo = std::min(p.t_lo, p.t_hi), hi = std::max(p.t_lo, p.t_hi);
        if (!(tau > lo && tau < hi)) continue;
        const int b = p.branch;
        auto f = [&](double q) { return t_of_q(b, q) - tau; };
        const double q = numerics::solve_bracket(f, {p.q_lo, p.q_hi}, 1e-14 * p.q_hi);
        const double d = std::abs(dt_dq(b, q)) * L_;  // |dt/dk|
        if (d > 0.0) s += 0.5 * psi_.density(q / L_) / d;
    }
    return s;
}

double FreeDwellSpectrum::sampled_density(double tau, double exclusion) const {
    auto it = std::lower_bound(singular_.begin(), singular_.end(), tau);
    for (auto j : {it, it == singular_.begin() ? it : it - 1}) {
        if (j == singular_.end()) continue;
        const double c = *j;
        if (std::abs(tau - c) < exclusion * c) {
            const double lo = c * (1.0 - exclusion), hi = c * (1.0 + exclusion);
            return density(tau - lo < hi - tau ? lo : hi);
        }
    }
    return density(tau);
}

std::vector<double> FreeDwellSpectrum::significant_singular_points(double rel) const {
    double wmax = 0.0;
    for (double w : singular_weight_) wmax = std::max(wmax, w);
    std::vector<double> out;
    for (std::size_t i = 0; i < singular_.size(); ++i)
        if (singular_weight_[i] > rel * wmax) out.push_back(singular_[i]);
    return out;
}

double FreeDwellSpectrum::integrate(const std::function<double(double)>& g, double lo, double hi,
                                    double rel_tol, double exclusion) const {
    // merged neighbourhoods of the singular points
    std::vector<std::pair<double, double>> hoods;
    for (double c : singular_) {
        const double a = c * (1.0 - exclusion), b = c * (1.0 + exclusion);
        if (!hoods.empty() && a <= hoods.back().second)
            hoods.back().second = std::max(hoods.back().second, b);
        else
            hoods.emplace_back(a, b);
    }
    auto inside = [&](double t) {
        for (const auto& h : hoods)
            if (t > h.first && t < h.second) return true;
        return false;
    };
    std::vector<double> br{lo, hi};
    for (const auto& h : hoods)
        for (double t : {h.first, h.second})
            if (t > lo && t < hi) br.push_back(t);
    for (const auto& p : pieces_)
        for (double t : {p.t_lo, p.t_hi})
            if (t > lo && t < hi) br.push_back(t);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    // inside a neighbourhood the root of t = tau is ill-conditioned, so the
    // mass is taken from the branch change of variables instead
    auto local_mass = [&](double a, double b, const numerics::QuadratureSpec& spec) {
        double total = 0.0;
        for (const auto& p : pieces_) {
            const bool up = p.t_hi > p.t_lo;
            const double pl = std::min(p.t_lo, p.t_hi), ph = std::max(p.t_lo, p.t_hi);
            const double ta = std::max(a, pl), tb = std::min(b, ph);
            if (!(tb > ta)) continue;
            auto q_at = [&](double t) {
                if (t == pl) return up ? p.q_lo : p.q_hi;
                if (t == ph) return up ? p.q_hi : p.q_lo;
                auto f = [&](double q) { return t_of_q(p.branch, q) - t; };
                return numerics::solve_bracket(f, {p.q_lo, p.q_hi}, 1e-15 * p.q_hi);
            };
            const double qa = q_at(ta), qb = q_at(tb);
            auto f = [&](double q) { return 0.5 * g(t_of_q(p.branch, q)) * psi_.density(q / L_) / L_; };
            total += numerics::integrate(f, std::min(qa, qb), std::max(qa, qb), spec).value;
        }
        return total;
    };
    auto f = [&](double tau) { return g(tau) * density(tau); };
    auto sweep = [&](const numerics::QuadratureSpec& spec) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const double a = br[i], b = br[i + 1];
            if (!(b > a)) continue;
            if (inside(0.5 * (a + b)))
                total += local_mass(a, b, spec);
            else
                total += numerics::integrate(f, a, b, spec, numerics::Endpoint::sqrt_both).value;
        }
        return total;
    };
    // coarse pass sets the absolute scale
    const double scale = std::abs(sweep({1e-10, 1e-6, 2000}));
    const double pieces = static_cast<double>(br.size());
    return sweep({std::max(1e-15, rel_tol * scale / pieces), rel_tol, 4000});
}

SampledDistribution free_dwell_distribution(const MomentumWavepacket& psi, const Region& D,
                                            const std::vector<double>& tau_grid,
                                            const UnitSystem& units) {
    FreeDwellSpectrum sp(psi, D, units);
    SampledDistribution out;
    out.tau = tau_grid;
    std::sort(out.tau.begin(), out.tau.end());
    out.density.reserve(out.tau.size());
    for (double t : out.tau) out.density.push_back(sp.sampled_density(t, out.exclusion));
    out.tau_min = sp.tau_min();
    out.tau_max = sp.tau_max();
    out.singular_points = sp.singular_points();
    return out;
}

double classical_dwell_distribution(const MomentumWavepacket& psi, const Region& D, double tau,
                                    const UnitSystem& u) {
    if (!(tau > 0.0)) throw DomainError("classical distribution: tau must be positive");
    if (psi.support() != Support::positive)
        throw DomainError("classical distribution: packet must have positive-momentum support");
    const double kt = u.mass * D.length() / (u.hbar * tau);
    return kt / tau * psi.density(kt);
}

cplx characteristic_function(const MomentumWavepacket& psi, const Region& D, double omega,
                             const UnitSystem& u) {
    const double L = D.length(), c = omega * u.mass / u.hbar, s12 = D.x1 + D.x2;
    const bool full = psi.support() == Support::full_line;
    auto g = [&](double k) -> cplx {
        if (k == 0.0) return 0.0;
        const double ak = std::abs(k);
        const cplx pk = psi(k);
        const cplx ph = std::polar(1.0, c * L / ak);
        const double sn = std::sin(k * L);
        cplx v = ph * std::cos(c * sn / (k * k)) * std::norm(pk);
        if (full) {
            const cplx pm = psi(-k);
            v += cplx(0.0, 1.0) * ph * std::sin(c * sn / (ak * k)) * std::polar(1.0, -k * s12) * std::conj(pk) *
                 pm;
        }
        return v;
    };
    numerics::QuadratureSpec spec{1e-13, 1e-11, 20000};
    const double lo = psi.k_lo(), hi = psi.k_hi();
    if (lo < 0.0 && hi > 0.0)
        return numerics::integrate(g, lo, 0.0, spec).value + numerics::integrate(g, 0.0, hi, spec).value;
    return numerics::integrate(g, lo, hi, spec).value;
}

DomainDiagnostics check_domain_condition(const MomentumWavepacket& psi) {
    DomainDiagnostics d;
    auto decays = [&](double power) {
        // ratio |psi~|^2 / k^power must shrink by 10x from k = 1e-3 to 1e-8
        const double a = psi.density(1e-3) / std::pow(1e-3, power);
        const double b = psi.density(1e-8) / std::pow(1e-8, power);
        if (b == 0.0) return true;
        return b <= 0.1 * a;
    };
    d.first_moment_finite = decays(0.0);
    d.second_moment_finite = decays(1.0);
    d.operator_domain = decays(2.0);
    if (!d.first_moment_finite)
        d.messages.push_back("psi~(0) != 0: dwell-time average may diverge (free density decays as 1/tau)");
    if (!d.second_moment_finite)
        d.messages.push_back("|psi~(k)|^2/k does not vanish as k -> 0: second dwell moment may diverge");
    if (!d.operator_domain)
        d.messages.push_back("psi~(k)/k does not vanish as k -> 0: state outside the dwell-operator domain");
    return d;
}

namespace {

Moments free_moments_impl(const MomentumWavepacket& psi, const Region& D, const UnitSystem& u,
                          bool quantum) {
    if (psi.support() != Support::positive)
        throw DomainError("moments: packet must have positive-momentum support");
    Moments m;
    const auto diag = check_domain_condition(psi);
    for (const auto& s : diag.messages) m.warnings.push_back(s);
    const double L = D.length(), a = u.mass * L / u.hbar;
    numerics::QuadratureSpec spec{1e-14, 1e-12, 20000};
    const double lo = std::max(psi.k_lo(), 0.0), hi = psi.k_hi();
    if (!diag.first_moment_finite) {
        m.m1 = m.m2 = std::numeric_limits<double>::infinity();
        return m;
    }
    m.m1 = numerics::integrate([&](double k) { return k > 0 ? psi.density(k) * a / k : 0.0; }, lo, hi, spec).value;
    m.m2 = numerics::integrate(
               [&](double k) {
                   if (!(k > 0)) return 0.0;
                   const double t = a / k, s = quantum ? sinc(k * L) : 0.0;
                   return psi.density(k) * t * t * (1.0 + s * s);
               },
               lo, hi, spec)
               .value;
    if (!diag.second_moment_finite) m.m2 = std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace

Moments dwell_moments_free(const MomentumWavepacket& psi, const Region& D, const UnitSystem& u) {
    return free_moments_impl(psi, D, u, true);
}

Moments classical_operator_moments(const MomentumWavepacket& psi, const Region& D, const UnitSystem& u) {
    return free_moments_impl(psi, D, u, false);
}

double mirror_average_dwell(double k, const Region& D, double X, const UnitSystem& u) {
    require_positive_k(k);
    if (!(X > D.x2)) throw DomainError("mirror must lie beyond the region (X > x2)");
    const double L = D.length(), Xr = X - D.x1;
    return 2.0 * (L * u.mass / (u.hbar * k)) * (1.0 - std::cos(k * (L + 2.0 * Xr)) * sinc(k * L));
}

TranslationCheck translate_region_check(double k, const Region& D, double a, const UnitSystem& u) {
    const Region Dp = D.shifted(a);
    TranslationCheck r{free_eigenvalues(k, D, u), free_eigenvalues(k, Dp, u), 0.0, 0.0};
    const auto [p0, m0] = free_eigenvectors(k, D);
    const auto [p1, m1] = free_eigenvectors(k, Dp);
    Eigen::Matrix2cd shift = Eigen::Matrix2cd::Zero();
    shift(0, 0) = std::polar(1.0, -a * k);
    shift(1, 1) = std::polar(1.0, a * k);
    r.overlap_plus = p1.dot(shift * p0);
    r.overlap_minus = m1.dot(shift * m0);
    return r;
}

}  // namespace dwell
