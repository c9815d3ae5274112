#pragma once

#include <Eigen/Dense>
#include <utility>

#include "dwell/freedwell.hpp"
#include "dwell/numerics.hpp"
#include "dwell/units.hpp"

namespace dwell {

// Density matrix (1 + r.sigma)/2 of a two-level state.
struct BlochVector {
    double r_x = 0.0, r_y = 0.0, r_z = 0.0;
    double norm() const;
};

// Residence in |1> = (1, 0) over [0, T] for H = (hbar Omega / 2) sigma_x.
struct TwoLevelResidence {
    double Omega, T_window;
    Eigen::Matrix2cd matrix;
    TwoLevelResidence(double Omega, double T);
};

Eigen::Matrix2cd residence_matrix(double Omega, double T);

// (tau_plus, tau_minus), tau_plus >= tau_minus
std::pair<double, double> residence_eigenvalues(double Omega, double T);

// tr(rho tau) for rho = (1 + r.sigma)/2; throws DomainError for |r| > 1 + 1e-12
double residence_average(double Omega, double T, const BlochVector& r);

// Frobenius norm of [H, tau]
double residence_commutator_norm(double Omega, double T, const UnitSystem& units = {});

// Int_0^T U^dag(t) P U(t) dt by composite Simpson with `steps` intervals
Eigen::Matrix2cd residence_matrix_quadrature(double Omega, double T, int steps = 1000);

struct OscillatorFraction {
    double fraction;    // Int_D |phi_n|^2 dx
    double eigenvalue;  // period times fraction
};

// Region bounds in units of the oscillator length sqrt(hbar / m omega); either
// bound may be infinite.
OscillatorFraction ho_fraction_of_time(int n, double u1, double u2, double omega = 1.0);
OscillatorFraction ho_fraction_of_time(int n, const Region& D, double omega = 1.0, const UnitSystem& units = {});

}  // namespace dwell
