#include "dwell/residence.hpp"

#include <cmath>

#include "dwell/errors.hpp"

namespace dwell {

namespace {

void check_window(double Omega, double T) {
    if (!(Omega > 0.0) || !(T > 0.0) || !std::isfinite(Omega) || !std::isfinite(T))
        throw DomainError("residence: need Omega > 0 and T > 0");
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(r_x * r_x + r_y * r_y + r_z * r_z); }

TwoLevelResidence::TwoLevelResidence(double Omega_, double T)
    : Omega(Omega_), T_window(T), matrix(residence_matrix(Omega_, T)) {}

Eigen::Matrix2cd residence_matrix(double Omega, double T) {
    check_window(Omega, T);
    const double s = std::sin(Omega * T) / (2.0 * Omega);
    const double c = (1.0 - std::cos(Omega * T)) / (2.0 * Omega);
    const cplx i(0.0, 1.0);
    Eigen::Matrix2cd M;
    M << T / 2.0 + s, -i * c, i * c, T / 2.0 - s;
    return M;
}

std::pair<double, double> residence_eigenvalues(double Omega, double T) {
    check_window(Omega, T);
    const double d = std::abs(std::sin(Omega * T / 2.0)) / Omega;
    return {T / 2.0 + d, T / 2.0 - d};
}

double residence_average(double Omega, double T, const BlochVector& r) {
    check_window(Omega, T);
    if (!(r.norm() <= 1.0 + 1e-12)) throw DomainError("residence: Bloch vector outside the unit ball");
    return T / 2.0 + ((1.0 - std::cos(Omega * T)) * r.r_y + std::sin(Omega * T) * r.r_z) / (2.0 * Omega);
}

double residence_commutator_norm(double Omega, double T, const UnitSystem& units) {
    const Eigen::Matrix2cd tau = residence_matrix(Omega, T);
    Eigen::Matrix2cd H;
    H << 0.0, 0.5 * units.hbar * Omega, 0.5 * units.hbar * Omega, 0.0;
    return (H * tau - tau * H).norm();
}

Eigen::Matrix2cd residence_matrix_quadrature(double Omega, double T, int steps) {
    check_window(Omega, T);
    if (steps < 2 || steps % 2 != 0) throw DomainError("residence: Simpson needs an even step count");
    // U(t) = cos(Omega t / 2) - i sin(Omega t / 2) sigma_x
    auto integrand = [Omega](double t) {
        const double c = std::cos(Omega * t / 2.0), s = std::sin(Omega * t / 2.0);
        Eigen::Matrix2cd U;
        U << c, cplx(0.0, -s), cplx(0.0, -s), c;
        Eigen::Matrix2cd P = Eigen::Matrix2cd::Zero();
        P(0, 0) = 1.0;
        return Eigen::Matrix2cd(U.adjoint() * P * U);
    };
    const double h = T / steps;
    Eigen::Matrix2cd sum = integrand(0.0) + integrand(T);
    for (int j = 1; j < steps; ++j) sum += (j % 2 == 1 ? 4.0 : 2.0) * integrand(j * h);
    return sum * (h / 3.0);
}

OscillatorFraction ho_fraction_of_time(int n, double u1, double u2, double omega) {
    if (n < 0 || n > 200) throw DomainError("oscillator: need 0 <= n <= 200");
    if (!(omega > 0.0)) throw DomainError("oscillator: need omega > 0");
    if (std::isnan(u1) || std::isnan(u2) || !(u2 > u1)) throw DomainError("oscillator: need u1 < u2");
    const double window = std::sqrt(2.0 * n + 1.0) + 8.0;
    const double a = std::max(u1, -window), b = std::min(u2, window);
    double fraction = 0.0;
    if (b > a) {
        numerics::QuadratureSpec spec;
        spec.abs_tol = 1e-15;
        spec.rel_tol = 1e-13;
        // panels of about one node spacing
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * std::sqrt(2.0 * n + 1.0) / 2.0)));
        const double h = (b - a) / panels;
        for (int j = 0; j < panels; ++j)
            fraction += numerics::integrate([n](double u) { return numerics::hermite_density(n, u); },
                                            a + j * h, a + (j + 1) * h, spec)
                            .value;
    }
    return {fraction, 2.0 * numerics::pi / omega * fraction};
}

OscillatorFraction ho_fraction_of_time(int n, const Region& D, double omega, const UnitSystem& units) {
    const double a0 = std::sqrt(units.hbar / (units.mass * omega));
    return ho_fraction_of_time(n, D.x1 / a0, D.x2 / a0, omega);
}

}  // namespace dwell
