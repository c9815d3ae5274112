#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dwell/numerics.hpp"
#include "dwell/units.hpp"
#include "dwell/wavepacket.hpp"

namespace dwell {

struct Region {
    double x1, x2;
    Region(double a, double b);
    double length() const { return x2 - x1; }
    bool contains(double x) const { return x >= x1 && x <= x2; }
    Region shifted(double a) const { return Region(x1 + a, x2 + a); }
};

// Free eigenvalues at wavenumber k. t_plus/t_minus follow the sign of the
// sin(kL)/kL term, so the two branches cross at kL = n pi.
struct DwellEigenpair {
    double k;
    double t_plus, t_minus;
    cplx phase;  // exp(ik(x1 + x2)): relative phase of the -k component
    double larger() const { return std::max(t_plus, t_minus); }
    double smaller() const { return std::min(t_plus, t_minus); }
};

// 2x2 on-shell matrix in the basis (|k>, |-k>).
struct OnShellDwellMatrix {
    double k;
    Eigen::Matrix2cd m;
    // eigenvalues in descending order
    std::pair<double, double> eigenvalues() const;
    double hermiticity_defect() const { return (m - m.adjoint()).norm(); }
    double trace() const { return (m(0, 0) + m(1, 1)).real(); }
};

DwellEigenpair free_eigenvalues(double k, const Region& D, const UnitSystem& units = {});

// Coefficients of |t_+> and |t_-> on (|k>, |-k>):
// (exp(-ik x1), +-exp(ik x2)) / sqrt 2.
std::pair<Eigen::Vector2cd, Eigen::Vector2cd> free_eigenvectors(double k, const Region& D);

OnShellDwellMatrix free_onshell_matrix(double k, const Region& D, const UnitSystem& units = {});

struct SampledDistribution {
    std::vector<double> tau;
    std::vector<double> density;
    double tau_min = 0.0, tau_max = 0.0;
    std::vector<double> singular_points;
    double exclusion = 1e-4;  // relative half-width of the excluded neighbourhoods
};

// Dwell-time density for a positive-momentum packet. The k-window is split at
// the extrema of t_+(k) and t_-(k); on each monotone piece t = tau has at most
// one root.
class FreeDwellSpectrum {
public:
    FreeDwellSpectrum(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units = {});

    double density(double tau) const;
    // density with samples inside the excluded neighbourhoods moved to the
    // nearest neighbourhood edge
    double sampled_density(double tau, double exclusion = 1e-4) const;

    // Int g(tau) Pi(tau) dtau over [lo, hi] by quadrature in tau, split at the
    // piece ends with square-root endpoint handling. Within the relative
    // `exclusion` neighbourhoods of singular points the mass is integrated in k.
    double integrate(const std::function<double(double)>& g, double lo, double hi,
                     double rel_tol = 1e-8, double exclusion = 1e-4) const;
    double integrate(const std::function<double(double)>& g, double rel_tol = 1e-8) const {
        return integrate(g, tau_min_, tau_max_, rel_tol);
    }

    const std::vector<double>& singular_points() const { return singular_; }
    // singular points whose packet weight exceeds `rel` of the peak weight
    std::vector<double> significant_singular_points(double rel = 1e-3) const;
    double tau_min() const { return tau_min_; }
    double tau_max() const { return tau_max_; }

private:
    struct Piece {
        int branch;  // +1 or -1
        double q_lo, q_hi;
        double t_lo, t_hi;  // t at q_lo and q_hi
    };
    double t_of_q(int branch, double q) const;
    double dt_dq(int branch, double q) const;

    MomentumWavepacket psi_;
    double L_, T0_;
    std::vector<Piece> pieces_;
    std::vector<double> singular_;
    std::vector<double> singular_weight_;
    double tau_min_ = 0.0, tau_max_ = 0.0;
};

SampledDistribution free_dwell_distribution(const MomentumWavepacket& psi, const Region& D,
                                            const std::vector<double>& tau_grid,
                                            const UnitSystem& units = {});

double classical_dwell_distribution(const MomentumWavepacket& psi, const Region& D, double tau,
                                    const UnitSystem& units = {});

cplx characteristic_function(const MomentumWavepacket& psi, const Region& D, double omega,
                             const UnitSystem& units = {});

struct Moments {
    double m1 = 0.0, m2 = 0.0;
    std::vector<std::string> warnings;
};

Moments dwell_moments_free(const MomentumWavepacket& psi, const Region& D, const UnitSystem& units = {});
Moments classical_operator_moments(const MomentumWavepacket& psi, const Region& D,
                                   const UnitSystem& units = {});

double mirror_average_dwell(double k, const Region& D, double X, const UnitSystem& units = {});

struct TranslationCheck {
    DwellEigenpair before, after;
    cplx overlap_plus, overlap_minus;  // <t,D+a| exp(-iak)|t,D>
};
TranslationCheck translate_region_check(double k, const Region& D, double a, const UnitSystem& units = {});

// Behaviour of psi~(k) as k -> 0 on a logarithmic mesh in [1e-8, 1e-3].
struct DomainDiagnostics {
    bool first_moment_finite = true;   // |psi~|^2 -> 0
    bool second_moment_finite = true;  // |psi~|^2 / k -> 0
    bool operator_domain = true;       // |psi~| / k -> 0
    std::vector<std::string> messages;
};
DomainDiagnostics check_domain_condition(const MomentumWavepacket& psi);

}  // namespace dwell
