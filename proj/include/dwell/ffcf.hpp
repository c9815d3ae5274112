#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dwell/freedwell.hpp"
#include "dwell/scatter.hpp"

namespace dwell {

// Stationary flux-flux moments for free motion at wavenumber k.
struct StationaryMoments {
    double order1, order2, order3;
    double order3_dwell;  // (T^3)_kk for comparison
};

StationaryMoments pm_free_moments(double k, const Region& D, const UnitSystem& units = {});

// Packet averages of the stationary moments over |psi~(k)|^2.
StationaryMoments packet_stationary_moments(const MomentumWavepacket& psi, const Region& D,
                                            const UnitSystem& units = {});

struct StationaryIdentity {
    double moment1, moment2;  // from the chi_D matrix elements
    double dwell1, dwell2;    // from the eigendecomposition
};

StationaryIdentity pm_stationary_identity_check(const PiecewisePotential& pot, const Region& D, double k);

// g(x) = -2 exp(i m x^2 / 2 hbar tau) sqrt(i pi hbar tau / 2m) + i pi x erfi(sqrt(i m / 2 hbar tau) x)
cplx g_kernel(double x, double tau, const UnitSystem& units = {});
// first and second total tau-derivatives of g(hbar k tau / m + c, tau)
cplx g_kernel_d1(double k, double c, double tau, const UnitSystem& units = {});
cplx g_kernel_d2(double k, double c, double tau, const UnitSystem& units = {});
// second derivative by central differences of g_kernel, h = 1e-4 tau, one Richardson step
cplx g_kernel_d2_fd(double k, double c, double tau, const UnitSystem& units = {});

enum class KernelDerivative { analytic, finite_difference };

struct FfcfSample {
    double tau;
    double value;
    std::optional<std::pair<double, double>> components;  // (C0, C1)
};

struct FfcfMoments {
    double m1 = 0.0, m2 = 0.0;
    std::vector<std::string> warnings;
};

// Time-dependent flux-flux correlation function of a free positive-momentum
// packet for the region D.
class FreeFfcf {
public:
    FreeFfcf(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units = {},
             KernelDerivative derivative = KernelDerivative::analytic, double tau_min = 1e-3);

    double operator()(double tau) const;
    std::vector<FfcfSample> sample(const std::vector<double>& taus) const;

    // C ~ a tau^(-3/2) as tau -> 0 (self-correlation at each boundary)
    double small_tau_coefficient() const { return a_; }
    // Int_0^inf C dtau with the divergent self-correlation at tau -> 0 taken
    // as a finite part. Below max(tau_min, crossing/100) the integral is the
    // closed-form first derivative of the kernel bracket; closer to 0 the
    // boundary terms carry a chirp of period ~ hbar tau^2 / m L^2.
    double normalization(double rel_tol = 1e-8) const;
    // Int_0^inf tau^n C dtau, n >= 1; below tau_min the leading small-tau
    // asymptotic is integrated in closed form.
    double moment(int n, double rel_tol = 1e-8) const;

    double tau_min() const { return tau_min_; }
    double tau_max() const { return tau_max_; }  // beyond it C is negligible
    double crossing_time() const { return crossing_; }  // m L / hbar <k>

private:
    struct Nodes {
        std::vector<double> k, w;  // w = weight |psi~|^2 m / (2 pi hbar k)
    };
    const Nodes& nodes_for(double tau) const;
    // Re Int dk w(k) d/dtau [2g(x) - g(x - L) - g(x + L)]
    double first_derivative(double tau) const;

    MomentumWavepacket psi_;
    Region D_;
    UnitSystem units_;
    KernelDerivative derivative_;
    double tau_min_, tau_max_ = 0.0, a_ = 0.0, crossing_ = 0.0;
    mutable std::map<int, Nodes> cache_;
};

double ffcf_free(const MomentumWavepacket& psi, const Region& D, double tau, const UnitSystem& units = {},
                 KernelDerivative derivative = KernelDerivative::analytic);

// Int tau^n C dtau over tabulated samples; warns when the last samples have
// not decayed.
FfcfMoments ffcf_moments(const std::vector<FfcfSample>& samples);

// Positive hump of C around its largest maximum beyond the small-tau region.
struct HumpSummary {
    double tau_lo, tau_hi;  // contiguous positive region
    double argmax, peak;
    double centroid;        // Int tau C / Int C over the hump
};
HumpSummary ffcf_hump(const std::vector<FfcfSample>& samples, double tau_from);

// J(x, t) = (hbar/m) Im[psi* d_x psi]
double current_density(const MomentumWavepacket& psi, double x, double t, const UnitSystem& units = {});
// <psi|J(x, t)|phi>
cplx flux_matrix_element(const MomentumWavepacket& psi, const MomentumWavepacket& phi, double x, double t,
                         const UnitSystem& units = {});

// Zeroth-order correlation from expectation currents at the two boundaries on
// a uniform time grid.
class ZerothOrderFfcf {
public:
    ZerothOrderFfcf(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units = {},
                    double current_floor = 1e-10);
    double operator()(double tau) const;
    // Int tau^n C0 dtau, n = 0, 1, 2
    double moment(int n) const;
    double dt() const { return dt_; }
    double t_begin() const { return t0_; }
    std::size_t steps() const { return J1_.size(); }

private:
    std::vector<double> lag_values() const;

    double dt_, t0_;
    std::vector<double> J1_, J2_;
    mutable std::vector<double> lags_;
};

double ffcf_zeroth_approx(const MomentumWavepacket& psi, const Region& D, double tau, const UnitSystem& units = {});

// <psi|J|psiQ> from diagonal currents of psi + psiQ and psi +- i psiQ.
cplx cross_flux_from_diagonal(const MomentumWavepacket& psi, const MomentumWavepacket& psiQ, double x, double t,
                              const UnitSystem& units = {});

// Orthonormal states orthogonal to psi: psi~(k) times Hermite polynomials of
// (k - <k>) / k_scale, orthonormalised.
std::vector<MomentumWavepacket> gram_schmidt_partners(const MomentumWavepacket& psi, int count);

}  // namespace dwell
