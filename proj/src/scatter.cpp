#include "dwell/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "dwell/errors.hpp"

namespace dwell {

using numerics::pi;

namespace {

const double sqrt_2pi = std::sqrt(2.0 * pi);

// cos(kappa u) and sin(kappa u)/kappa for kappa^2 = z; both are entire in z.
struct CosSin {
    cplx c, s;
};

CosSin cos_sin(cplx z, double u) {
    const cplx a2 = z * u * u;
    if (std::abs(a2) < 1e-4) {
        return {1.0 - a2 / 2.0 + a2 * a2 / 24.0, u * (1.0 - a2 / 6.0 + a2 * a2 / 120.0)};
    }
    const cplx a = std::sqrt(z) * u;
    return {std::cos(a), u * std::sin(a) / a};
}

// Int_0^w exp(i beta u) du
cplx exp_integral(cplx beta, double w) {
    const cplx z = cplx(0.0, 1.0) * beta * w;
    if (std::abs(z) < 0.1) {
        cplx term = 1.0, sum = 1.0;
        for (int n = 2; n <= 10; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
        }
        return w * sum;
    }
    return w * (std::exp(z) - 1.0) / z;
}

// Stationary state data at the support boundaries, without the 1/sqrt(2 pi).
struct State {
    double k = 0.0;  // signed
    std::vector<double> x;
    std::vector<cplx> psi, dpsi;
    std::vector<cplx> z;  // kappa^2 per segment
    cplx T = 1.0, R = 0.0;
    bool threshold = false;
};

State solve(const PiecewisePotential& pot, double k) {
    if (!(k != 0.0) || !std::isfinite(k)) throw DomainError("scattering: wavenumber must be nonzero");
    State s;
    s.k = k;
    if (pot.empty()) return s;
    const auto& seg = pot.segments();
    const auto& u = pot.units();
    const double kk = std::abs(k);
    const std::size_t n = seg.size();
    s.x.resize(n + 1);
    s.psi.resize(n + 1);
    s.dpsi.resize(n + 1);
    s.z.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.x[j] = seg[j].x_start;
        s.z[j] = kk * kk - 2.0 * u.mass * seg[j].V / (u.hbar * u.hbar);
        if (std::abs(s.z[j]) <= 1e-14 * kk * kk) s.threshold = true;
    }
    s.x[n] = seg.back().x_end;
    const cplx ik(0.0, kk);
    if (k > 0) {
        // transmitted wave on the right, integrated leftwards
        s.psi[n] = std::polar(1.0, kk * s.x[n]);
        s.dpsi[n] = ik * s.psi[n];
        for (std::size_t j = n; j-- > 0;) {
            const auto cs = cos_sin(s.z[j], s.x[j] - s.x[j + 1]);
            s.psi[j] = s.psi[j + 1] * cs.c + s.dpsi[j + 1] * cs.s;
            s.dpsi[j] = -s.z[j] * cs.s * s.psi[j + 1] + cs.c * s.dpsi[j + 1];
        }
        const cplx a = 0.5 * std::polar(1.0, -kk * s.x[0]) * (s.psi[0] + s.dpsi[0] / ik);
        const cplx b = 0.5 * std::polar(1.0, kk * s.x[0]) * (s.psi[0] - s.dpsi[0] / ik);
        s.T = 1.0 / a;
        s.R = b / a;
    } else {
        s.psi[0] = std::polar(1.0, -kk * s.x[0]);
        s.dpsi[0] = -ik * s.psi[0];
        for (std::size_t j = 0; j < n; ++j) {
            const auto cs = cos_sin(s.z[j], s.x[j + 1] - s.x[j]);
            s.psi[j + 1] = s.psi[j] * cs.c + s.dpsi[j] * cs.s;
            s.dpsi[j + 1] = -s.z[j] * cs.s * s.psi[j] + cs.c * s.dpsi[j];
        }
        const cplx c = 0.5 * std::polar(1.0, kk * s.x[n]) * (s.psi[n] - s.dpsi[n] / ik);
        const cplx d = 0.5 * std::polar(1.0, -kk * s.x[n]) * (s.psi[n] + s.dpsi[n] / ik);
        s.T = 1.0 / c;
        s.R = d / c;
    }
    for (std::size_t j = 0; j <= n; ++j) {
        s.psi[j] *= s.T;
        s.dpsi[j] *= s.T;
    }
    return s;
}

// value and derivative of the unnormalised state
std::pair<cplx, cplx> evaluate(const State& s, double x) {
    const double k = s.k;
    const cplx ik(0.0, k);
    auto wave = [&](cplx in, cplx out) {
        // in * e^{ikx} + out * e^{-ikx}
        const cplx e = std::polar(1.0, k * x);
        return std::pair<cplx, cplx>{in * e + out / e, ik * (in * e - out / e)};
    };
    if (s.x.empty()) return wave(1.0, 0.0);
    if (x < s.x.front()) return k > 0 ? wave(1.0, s.R) : wave(s.T, 0.0);
    if (x > s.x.back()) return k > 0 ? wave(s.T, 0.0) : wave(1.0, s.R);
    std::size_t j = std::upper_bound(s.x.begin(), s.x.end(), x) - s.x.begin();
    j = std::min(j == 0 ? 0 : j - 1, s.z.size() - 1);
    // start from the end the solve came from, where the state is dominant
    const std::size_t e = k > 0 ? j + 1 : j;
    const auto cs = cos_sin(s.z[j], x - s.x[e]);
    return {s.psi[e] * cs.c + s.dpsi[e] * cs.s, -s.z[j] * cs.s * s.psi[e] + cs.c * s.dpsi[e]};
}

// Constant-kappa piece [x0, x0 + w] of a state: A exp(i kappa (x - x0)) +
// B exp(-i kappa (x - x0)), with (psi, dpsi) kept at x0 for the threshold path.
struct Piece {
    double x0, w;
    cplx z, kappa, A, B, psi, dpsi;
};

// Coefficients are split at the end the solve came from and moved to x0 with
// exact exponential factors, so no cancellation against a dominant term.
Piece make_piece(cplx z, double x0, double w, double xe, cplx pe, cplx de) {
    Piece p{x0, w, z, std::sqrt(z), 0.0, 0.0, 0.0, 0.0};
    const auto cs = cos_sin(z, x0 - xe);
    p.psi = pe * cs.c + de * cs.s;
    p.dpsi = -z * cs.s * pe + cs.c * de;
    if (std::abs(p.kappa) * w >= 0.5) {
        const cplx ik = cplx(0.0, 1.0) * p.kappa;
        const cplx Ae = 0.5 * (pe + de / ik), Be = 0.5 * (pe - de / ik);
        const cplx shift = std::exp(ik * (x0 - xe));
        p.A = Ae * shift;
        p.B = Be / shift;
    }
    return p;
}

std::vector<Piece> pieces_on(const State& s, const Region& D) {
    std::vector<Piece> out;
    const double kk = std::abs(s.k);
    auto free_piece = [&](double a, double b) {
        auto [p, d] = evaluate(s, a);
        out.push_back(make_piece(kk * kk, a, b - a, a, p, d));
    };
    if (s.x.empty()) {
        free_piece(D.x1, D.x2);
        return out;
    }
    if (D.x1 < s.x.front()) free_piece(D.x1, s.x.front());
    for (std::size_t j = 0; j < s.z.size(); ++j) {
        const std::size_t e = s.k > 0 ? j + 1 : j;
        out.push_back(make_piece(s.z[j], s.x[j], s.x[j + 1] - s.x[j], s.x[e], s.psi[e], s.dpsi[e]));
    }
    if (D.x2 > s.x.back()) free_piece(s.x.back(), D.x2);
    return out;
}

// Int_0^w conj(a(u)) b(u) du for two pieces with the same kappa
cplx overlap(const Piece& a, const Piece& b) {
    const cplx kap = a.kappa;
    const double w = a.w;
    if (std::abs(kap) * w >= 0.5) {
        const cplx kc = std::conj(kap);
        return std::conj(a.A) * b.A * exp_integral(kap - kc, w) + std::conj(a.A) * b.B * exp_integral(-(kap + kc), w) +
               std::conj(a.B) * b.A * exp_integral(kap + kc, w) + std::conj(a.B) * b.B * exp_integral(kc - kap, w);
    }
    // near threshold the exponential amplitudes cancel; the integrand is
    // nearly polynomial here
    numerics::CompositeRule r(0.0, w, 2);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const auto cs = cos_sin(a.z, r.x[i]);
        sum += r.w[i] * std::conj(a.psi * cs.c + a.dpsi * cs.s) * (b.psi * cs.c + b.dpsi * cs.s);
    }
    return sum;
}

void require_support_in(const PiecewisePotential& pot, const Region& D) {
    if (pot.empty()) return;
    const double tol = 1e-12 * std::max(1.0, std::abs(D.x1) + std::abs(D.x2));
    if (pot.support_lo() < D.x1 - tol || pot.support_hi() > D.x2 + tol)
        throw DomainError("potential support must lie inside the region D");
}

void require_positive(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("wavenumber must be positive");
}

// cos s, sinc s, (1 - cos s)/s^2, (1 - sinc s)/s^2 for s^2 = z real
struct Entire {
    double c, sinc, vers, omsinc;
};

Entire entire(double z) {
    if (std::abs(z) < 1e-2) {
        const double z2 = z * z, z3 = z2 * z, z4 = z2 * z2;
        return {1.0 - z / 2.0 + z2 / 24.0 - z3 / 720.0 + z4 / 40320.0,
                1.0 - z / 6.0 + z2 / 120.0 - z3 / 5040.0 + z4 / 362880.0,
                0.5 - z / 24.0 + z2 / 720.0 - z3 / 40320.0 + z4 / 3628800.0,
                1.0 / 6.0 - z / 120.0 + z2 / 5040.0 - z3 / 362880.0 + z4 / 39916800.0};
    }
    double c, sc;
    if (z > 0) {
        const double s = std::sqrt(z);
        c = std::cos(s);
        sc = std::sin(s) / s;
    } else {
        const double s = std::sqrt(-z);
        c = std::cosh(s);
        sc = std::sinh(s) / s;
    }
    return {c, sc, (1.0 - c) / z, (1.0 - sc) / z};
}

}  // namespace

PiecewisePotential::PiecewisePotential(std::vector<Segment> segments, const UnitSystem& units)
    : segments_(std::move(segments)), units_(units) {
    for (std::size_t j = 0; j < segments_.size(); ++j) {
        const auto& s = segments_[j];
        if (!std::isfinite(s.x_start) || !std::isfinite(s.x_end) || !(s.x_end > s.x_start))
            throw DomainError("potential: segment needs finite x_start < x_end");
        if (!std::isfinite(s.V.real()) || !std::isfinite(s.V.imag()))
            throw DomainError("potential: segment value must be finite");
        if (s.V.imag() > 0.0) throw DomainError("potential: V_I must be non-negative (absorption only)");
        if (j > 0) {
            const double gap = s.x_start - segments_[j - 1].x_end;
            if (std::abs(gap) > 1e-12 * std::max(1.0, std::abs(s.x_start)))
                throw DomainError("potential: segments must be contiguous and ordered");
            segments_[j].x_start = segments_[j - 1].x_end;
        }
    }
}

PiecewisePotential PiecewisePotential::square_barrier(double L, double V0, double VI, const UnitSystem& units) {
    if (!(L > 0.0)) throw DomainError("square barrier: L must be positive");
    return PiecewisePotential({{0.0, L, cplx(V0, -VI)}}, units);
}

PiecewisePotential PiecewisePotential::parse(std::istream& in) {
    std::vector<Segment> segs;
    UnitSystem u;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("potential file line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        std::vector<double> nums;
        std::stringstream ss(val);
        std::string item;
        try {
            while (std::getline(ss, item, ',')) {
                std::size_t used = 0;
                const std::string t = trim(item);
                nums.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument(t);
            }
        } catch (const std::exception&) {
            throw DomainError("potential file line " + std::to_string(lineno) + ": bad number");
        }
        if (key == "segment") {
            if (nums.size() != 4)
                throw DomainError("potential file line " + std::to_string(lineno) + ": segment needs x_start, x_end, V_R, V_I");
            segs.push_back({nums[0], nums[1], cplx(nums[2], -nums[3])});
        } else if (key == "units.hbar" || key == "units.mass" || key == "units.length") {
            if (nums.size() != 1 || !(nums[0] > 0.0))
                throw DomainError("potential file line " + std::to_string(lineno) + ": unit must be one positive number");
            (key == "units.hbar" ? u.hbar : key == "units.mass" ? u.mass : u.length) = nums[0];
            u.name = "file";
        } else {
            throw DomainError("potential file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return PiecewisePotential(std::move(segs), u);
}

PiecewisePotential PiecewisePotential::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open potential file " + path);
    return parse(f);
}

bool PiecewisePotential::absorbing() const {
    return std::any_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.V.imag() < 0.0; });
}

int PiecewisePotential::segment_at(double x) const {
    for (std::size_t j = 0; j < segments_.size(); ++j)
        if (x >= segments_[j].x_start && x <= segments_[j].x_end) return static_cast<int>(j);
    return -1;
}

ScatteringAmplitudes scattering_amplitudes(const PiecewisePotential& pot, double k) {
    require_positive(k);
    const State l = solve(pot, k), r = solve(pot, -k);
    return {k, l.T, l.R, r.T, r.R, l.threshold};
}

std::pair<cplx, cplx> stationary_state_dx(const PiecewisePotential& pot, double k, double x) {
    const auto [p, d] = evaluate(solve(pot, k), x);
    return {p / sqrt_2pi, d / sqrt_2pi};
}

cplx stationary_state(const PiecewisePotential& pot, double k, double x) {
    return stationary_state_dx(pot, k, x).first;
}

Eigen::Matrix2cd chi_matrix_elements(const PiecewisePotential& pot, const Region& D, double k) {
    require_positive(k);
    require_support_in(pot, D);
    const auto pp = pieces_on(solve(pot, k), D), pm = pieces_on(solve(pot, -k), D);
    const std::vector<Piece>* st[2] = {&pp, &pm};
    Eigen::Matrix2cd m;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < pp.size(); ++i) s += overlap((*st[a])[i], (*st[b])[i]);
            m(a, b) = s / (2.0 * pi);
        }
    // exact Hermitian structure
    m(0, 0) = m(0, 0).real();
    m(1, 1) = m(1, 1).real();
    const cplx off = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
    m(1, 0) = off;
    m(0, 1) = std::conj(off);
    return m;
}

Eigen::Matrix2cd chi_from_amplitudes(const PiecewisePotential& pot, double k) {
    require_positive(k);
    if (pot.empty() || std::abs(pot.support_lo()) > 1e-14)
        throw DomainError("amplitude formula needs a potential supported on [0, L]");
    const double L = pot.support_hi();
    const auto a = scattering_amplitudes(pot, k);
    // central differences with one Richardson step
    auto deriv = [&](auto get) {
        auto dq = [&](double h) {
            return (get(scattering_amplitudes(pot, k + h)) - get(scattering_amplitudes(pot, k - h))) / (2.0 * h);
        };
        const double h = 1e-6 * k;
        return (4.0 * dq(h / 2) - dq(h)) / 3.0;
    };
    const cplx dRl = deriv([](const ScatteringAmplitudes& s) { return std::conj(s.R_l); });
    const cplx dTl = deriv([](const ScatteringAmplitudes& s) { return std::conj(s.T_l); });
    const cplx dRr = deriv([](const ScatteringAmplitudes& s) { return std::conj(s.R_r); });
    const cplx dTr = deriv([](const ScatteringAmplitudes& s) { return std::conj(s.T_r); });
    const cplx I(0.0, 1.0);
    const cplx e2 = std::polar(1.0, 2.0 * k * L);
    Eigen::Matrix2cd m;
    m(0, 0) = L / (2 * pi) * std::norm(a.T_l) + I / (2 * pi) * (a.R_l * dRl + a.T_l * dTl) +
              I / (4 * pi * k) * (std::conj(a.R_l) - a.R_l);
    m(1, 1) = L / (2 * pi) * (1.0 + std::norm(a.R_r)) + I / (2 * pi) * (a.R_r * dRr + a.T_r * dTr) +
              I / (4 * pi * k) * (std::conj(a.R_r) / e2 - e2 * a.R_r);
    m(1, 0) = L / (2 * pi) * a.T_l * std::conj(a.R_r) + I / (2 * pi) * (a.R_l * dTr + a.T_l * dRr) +
              I / (4 * pi * k) * (std::conj(a.T_r) - e2 * a.T_l);
    m(0, 1) = std::conj(m(1, 0));
    return m;
}

DwellDecomposition dwell_eigen_decomposition(const PiecewisePotential& pot, const Region& D, double k) {
    const auto chi = chi_matrix_elements(pot, D, k);
    const auto& u = pot.units();
    const double scale = 2.0 * pi * u.mass / (u.hbar * k);
    DwellDecomposition d;
    d.k = k;
    const double a = chi(0, 0).real(), b = chi(1, 1).real();
    d.sigma = std::abs(chi(1, 0));
    if (d.sigma <= 1e-14 * (std::abs(a) + std::abs(b))) {
        d.degenerate = true;
        d.phi = 0.0;
        d.xi_plus = d.xi_minus = d.mu = 0.0;
        d.t_plus = scale * std::max(a, b);
        d.t_minus = scale * std::min(a, b);
        d.N_plus = d.N_minus = 1.0;
        d.v_plus = a >= b ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
        d.v_minus = a >= b ? Eigen::Vector2cd(0, 1) : Eigen::Vector2cd(1, 0);
        return d;
    }
    d.phi = std::arg(chi(1, 0));
    d.xi_plus = a / d.sigma;
    d.xi_minus = b / d.sigma;
    d.mu = 0.5 * (d.xi_minus - d.xi_plus);
    const double r = std::sqrt(1.0 + d.mu * d.mu);
    const double mean = 0.5 * (d.xi_plus + d.xi_minus);
    d.t_plus = scale * d.sigma * (mean + r);
    d.t_minus = scale * d.sigma * (mean - r);
    d.N_plus = 1.0 / (std::sqrt(2.0) * std::sqrt(1.0 + d.mu * d.mu + d.mu * r));
    d.N_minus = 1.0 / (std::sqrt(2.0) * std::sqrt(1.0 + d.mu * d.mu - d.mu * r));
    const cplx e = std::polar(1.0, d.phi);
    d.v_plus = d.N_plus * Eigen::Vector2cd(1.0, e * (d.mu + r));
    d.v_minus = d.N_minus * Eigen::Vector2cd(1.0, e * (d.mu - r));
    return d;
}

OnShellDwellMatrix onshell_dwell_matrix(const PiecewisePotential& pot, const Region& D, double k) {
    const auto& u = pot.units();
    return {k, (2.0 * pi * u.mass / (u.hbar * k)) * chi_matrix_elements(pot, D, k)};
}

BarrierEigenvalues barrier_eigenvalues_closed_form(double k, double L, double V0, const UnitSystem& u) {
    require_positive(k);
    if (!(L > 0.0)) throw DomainError("barrier: L must be positive");
    const double q = k * L, Q2 = u.kappa2(V0) * L * L, z = q * q - Q2;
    const double T0 = u.mass * L * L / u.hbar;
    const auto e = entire(z);
    const double T2 = 1.0 / (1.0 + Q2 * Q2 * e.sinc * e.sinc / (4.0 * q * q));
    BarrierEigenvalues r;
    r.t_plus = T0 * T2 * (q * q * e.vers + 1.0 + e.c) * (1.0 + e.sinc) / (2.0 * q);
    r.t_minus = T0 * T2 * (q * q * (1.0 + e.c) + z * (1.0 - e.c)) * e.omsinc / (2.0 * q);
    r.t_plus_dimless = T0 * 2.0 * q * (1.0 + e.sinc) / (2.0 * q * q - Q2 * z * e.vers);
    r.t_minus_dimless = T0 * 2.0 * q * e.omsinc / (2.0 + Q2 * e.vers);
    const double scale = std::max(std::abs(r.t_plus), std::abs(r.t_minus));
    if (std::abs(r.t_plus - r.t_plus_dimless) > 1e-10 * scale ||
        std::abs(r.t_minus - r.t_minus_dimless) > 1e-10 * scale)
        throw NumericalError("barrier closed forms disagree at q = " + numerics::detail::fmt_sci(q));
    return r;
}

double stationary_dwell(const PiecewisePotential& pot, const Region& D, double k) {
    const auto& u = pot.units();
    return 2.0 * pi * u.mass / (u.hbar * k) * chi_matrix_elements(pot, D, k)(0, 0).real();
}

ScatteringMoments wavepacket_dwell_moments(const PiecewisePotential& pot, const Region& D,
                                           const MomentumWavepacket& psi) {
    if (psi.support() != Support::positive)
        throw DomainError("scattering moments: packet must be incident from the left");
    require_support_in(pot, D);
    const auto& u = pot.units();
    const double lo = std::max(psi.k_lo(), 0.0), hi = psi.k_hi();
    numerics::QuadratureSpec spec{1e-13, 1e-11, 20000};
    auto one = [&](double k) -> Eigen::Vector2d {
        if (!(k > 0.0)) return {0.0, 0.0};
        const auto chi = chi_matrix_elements(pot, D, k);
        const double s = 2.0 * pi * u.mass / (u.hbar * k), w = psi.density(k);
        const double a = chi(0, 0).real();
        return {w * s * a, w * s * s * (a * a + std::norm(chi(1, 0)))};
    };
    const double m1 = numerics::integrate([&](double k) { return one(k)(0); }, lo, hi, spec).value;
    const double m2 = numerics::integrate([&](double k) { return one(k)(1); }, lo, hi, spec).value;
    return {m1, m2};
}

double absorption_probability(const PiecewisePotential& pot, double k) {
    const auto a = scattering_amplitudes(pot, k);
    const double A = 1.0 - std::norm(a.T_l) - std::norm(a.R_l);
    if (A < -1e-12 || A > 1.0 + 1e-12)
        throw NumericalError("absorption probability outside [0, 1]: " + numerics::detail::fmt_sci(A));
    return std::clamp(A, 0.0, 1.0);
}

double fluorescence_dwell_estimate(double V_R, double V_I, double L, double k, const UnitSystem& units) {
    if (!(V_I > 0.0)) throw DomainError("fluorescence estimate needs V_I > 0");
    const auto pot = PiecewisePotential::square_barrier(L, V_R, V_I, units);
    return units.hbar * absorption_probability(pot, k) / (2.0 * V_I);
}

LaserParameters laser_parameters(double V_R, double V_I, double gamma, const UnitSystem& u) {
    if (!(V_R > 0.0) || !(V_I > 0.0) || !(gamma > 0.0))
        throw DomainError("laser parameters need V_R, V_I, gamma > 0");
    const double Delta = gamma * V_R / (2.0 * V_I);
    return {Delta, std::sqrt(4.0 * Delta * V_R / u.hbar)};
}

std::pair<double, double> effective_potential(double Delta, double Omega, double gamma, const UnitSystem& u) {
    if (!(Delta > 0.0) || !(Omega > 0.0) || !(gamma > 0.0))
        throw DomainError("effective potential needs Delta, Omega, gamma > 0");
    return {u.hbar * Omega * Omega / (4.0 * Delta), u.hbar * gamma * Omega * Omega / (8.0 * Delta * Delta)};
}

}  // namespace dwell
