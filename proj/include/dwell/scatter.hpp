#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwell/freedwell.hpp"
#include "dwell/numerics.hpp"
#include "dwell/units.hpp"
#include "dwell/wavepacket.hpp"

namespace dwell {

// Constant complex potential V = V_R - i V_I on [x_start, x_end].
struct Segment {
    double x_start, x_end;
    cplx V;
};

class PiecewisePotential {
public:
    PiecewisePotential() = default;  // V = 0 everywhere
    explicit PiecewisePotential(std::vector<Segment> segments, const UnitSystem& units = {});

    static PiecewisePotential square_barrier(double L, double V0, double VI = 0.0,
                                             const UnitSystem& units = {});
    // Plain-text form with lines `segment = x_start, x_end, V_R, V_I` and
    // `units.hbar`, `units.mass`, `units.length`. '#' starts a comment.
    static PiecewisePotential parse(std::istream& in);
    static PiecewisePotential from_file(const std::string& path);

    const std::vector<Segment>& segments() const { return segments_; }
    const UnitSystem& units() const { return units_; }
    bool empty() const { return segments_.empty(); }
    double support_lo() const { return segments_.front().x_start; }
    double support_hi() const { return segments_.back().x_end; }
    bool absorbing() const;
    // segment index containing x, -1 outside the support
    int segment_at(double x) const;

private:
    std::vector<Segment> segments_;
    UnitSystem units_;
};

struct ScatteringAmplitudes {
    double k;
    cplx T_l, R_l, T_r, R_r;
    bool at_threshold = false;  // some segment has kappa = 0 at this k
};

ScatteringAmplitudes scattering_amplitudes(const PiecewisePotential& pot, double k);

// Delta-normalised <x|k+>; k < 0 is right incidence.
cplx stationary_state(const PiecewisePotential& pot, double k, double x);
// value and x-derivative
std::pair<cplx, cplx> stationary_state_dx(const PiecewisePotential& pot, double k, double x);

// Entries <a|chi_D|b> for a, b in (|k+>, |-k+>), index 0 = +k.
Eigen::Matrix2cd chi_matrix_elements(const PiecewisePotential& pot, const Region& D, double k);

// Diagonal and -k/+k elements from the scattering amplitudes and their
// k-derivatives (support must be [0, L] and D = [0, L]).
Eigen::Matrix2cd chi_from_amplitudes(const PiecewisePotential& pot, double k);

struct DwellDecomposition {
    double k;
    double xi_plus, xi_minus;  // xi(k), xi(-k)
    double sigma, phi, mu;
    double t_plus, t_minus;  // t_plus >= t_minus
    double N_plus, N_minus;
    Eigen::Vector2cd v_plus, v_minus;  // coefficients on (|k+>, |-k+>)
    bool degenerate = false;           // sigma ~ 0: diagonal decomposition
};

DwellDecomposition dwell_eigen_decomposition(const PiecewisePotential& pot, const Region& D, double k);

// (2 pi m / hbar k) <a|chi_D|b>
OnShellDwellMatrix onshell_dwell_matrix(const PiecewisePotential& pot, const Region& D, double k);

struct BarrierEigenvalues {
    double t_plus, t_minus;                  // dimensional form
    double t_plus_dimless, t_minus_dimless;  // q, Q form, converted to time
};

// Square barrier of height V0 on [0, L]. Throws NumericalError when the two
// forms disagree by more than 1e-10.
BarrierEigenvalues barrier_eigenvalues_closed_form(double k, double L, double V0,
                                                   const UnitSystem& units = {});

// T_kk = (2 pi m / hbar k) Int_D |<x|k+>|^2 dx
double stationary_dwell(const PiecewisePotential& pot, const Region& D, double k);

struct ScatteringMoments {
    double m1, m2;
};

ScatteringMoments wavepacket_dwell_moments(const PiecewisePotential& pot, const Region& D,
                                           const MomentumWavepacket& psi);

// 1 - |T_l|^2 - |R_l|^2
double absorption_probability(const PiecewisePotential& pot, double k);

// hbar A(k) / (2 V_I) for V_R - i V_I on [0, L]
double fluorescence_dwell_estimate(double V_R, double V_I, double L, double k,
                                   const UnitSystem& units = {});

struct LaserParameters {
    double Delta, Omega;
};

// Detuning and Rabi frequency giving V_R = hbar Omega^2 / 4 Delta and
// V_I = hbar gamma Omega^2 / 8 Delta^2.
LaserParameters laser_parameters(double V_R, double V_I, double gamma, const UnitSystem& units = {});
std::pair<double, double> effective_potential(double Delta, double Omega, double gamma,
                                              const UnitSystem& units = {});

}  // namespace dwell
