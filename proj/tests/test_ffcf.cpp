#include <cmath>
#include <memory>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "dwell/ffcf.hpp"

using namespace dwell;
using numerics::pi;

namespace {

MomentumWavepacket fig6_packet() { return MomentumWavepacket::filtered_gaussian({2.0, 0.4, 0.5, -15.0}); }
const Region fig6_region(0.0, 45.0);

const FreeFfcf& fig6_ffcf() {
    static const FreeFfcf c(fig6_packet(), fig6_region);
    return c;
}

const Moments& fig6_moments() {
    static const Moments m = dwell_moments_free(fig6_packet(), fig6_region);
    return m;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("stationary free moments") {
    const Region D(0.0, 2.0);
    const double k = pi / 2;  // kL = pi
    const auto m = pm_free_moments(k, D);
    const double T0 = 2.0 / k;
    CHECK(std::abs(m.order1 - T0) < 1e-15);
    CHECK(std::abs(m.order2 / (T0 * T0) - 1.0) < 1e-15);
    CHECK(std::abs(m.order3 / std::pow(T0, 3) - (1.0 - 6.0 / (pi * pi))) < 1e-14);
    CHECK(std::abs(m.order3 / std::pow(T0, 3) - 0.392073) < 1e-6);
    CHECK(std::abs(m.order3_dwell / std::pow(T0, 3) - 1.0) < 1e-15);
    CHECK(1.0 - m.order3 / m.order3_dwell > 0.5);

    const auto big = pm_free_moments(20.0, D);  // kL = 40
    CHECK(std::abs(big.order3 - big.order3_dwell) / big.order3_dwell < 1e-2);

    // small-q series joins the direct form
    const Region U(0.0, 1.0);
    const auto lo = pm_free_moments(0.5 - 1e-12, U), hi = pm_free_moments(0.5 + 1e-12, U);
    CHECK(std::abs(lo.order3 / hi.order3 - 1.0) < 1e-11);
    // q -> 0: order3 ~ -(m L / hbar k)^3 q^2 / 5
    const auto tiny = pm_free_moments(1e-4, U);
    CHECK(std::abs(tiny.order3 / (-std::pow(1e4, 3) * 1e-8 / 5) - 1.0) < 1e-7);
    for (double q : {0.3, 1.0, 2.5, 7.0})
        CHECK(pm_free_moments(q, U).order2 >= std::pow(pm_free_moments(q, U).order1, 2) - 1e-12);
    CHECK_THROWS_AS(pm_free_moments(0.0, U), DomainError);
}

TEST_CASE("stationary identities from the scattering states") {
    const Region D(0.0, 1.0);
    const auto free = pm_stationary_identity_check(PiecewisePotential(), D, 2.3);
    CHECK(std::abs(free.moment2 / pm_free_moments(2.3, D).order2 - 1.0) < 1e-10);
    CHECK(std::abs(free.moment1 / pm_free_moments(2.3, D).order1 - 1.0) < 1e-10);

    // Q = 8 barrier at q = 10: nonzero on-shell variance
    const auto bar = PiecewisePotential::square_barrier(1.0, 32.0);
    const auto s = pm_stationary_identity_check(bar, D, 10.0);
    CHECK(s.moment2 - s.moment1 * s.moment1 > 1e-3 * s.moment2);
    CHECK(std::abs(s.moment1 / s.dwell1 - 1.0) < 1e-8);
    CHECK(std::abs(s.moment2 / s.dwell2 - 1.0) < 1e-8);
    // symmetric barrier: equal weights on both eigenvectors
    for (double k : {3.0, 8.5, 10.0, 21.0}) {
        const auto d = dwell_eigen_decomposition(bar, D, k);
        const auto c = pm_stationary_identity_check(bar, D, k);
        CHECK(std::abs(c.moment2 / (0.5 * (d.t_plus * d.t_plus + d.t_minus * d.t_minus)) - 1.0) < 1e-8);
    }
    const PiecewisePotential step({{0.0, 0.3, 5.0}, {0.3, 1.0, -2.0}});
    for (double k : {1.0, 4.0, 9.0}) {
        const auto c = pm_stationary_identity_check(step, D, k);
        CHECK(std::abs(c.moment1 / c.dwell1 - 1.0) < 1e-8);
        CHECK(std::abs(c.moment2 / c.dwell2 - 1.0) < 1e-8);
    }
}

TEST_CASE("kernel g") {
    for (double tau : {0.1, 1.0, 30.0}) {
        const cplx g0 = g_kernel(0.0, tau);
        CHECK(std::abs(g0 + 2.0 * std::sqrt(cplx(0.0, pi * tau / 2))) < 1e-14);
        for (double x : {0.3, 2.0, 11.0})
            CHECK(std::abs(g_kernel(-x, tau) - g_kernel(x, tau)) < 1e-13 * std::abs(g_kernel(x, tau)));
    }
    // tau = 1, x = 1 against erfi(z) = (2/sqrt pi) Int_0^1 z exp(z^2 s^2) ds
    const cplx z = std::sqrt(cplx(0.0, 0.5));
    const auto path = numerics::integrate([&](double s) { return z * std::exp(z * z * s * s); }, 0.0, 1.0,
                                          {1e-15, 1e-14, 1000});
    const cplx oracle = -2.0 * std::exp(cplx(0.0, 0.5)) * std::sqrt(cplx(0.0, pi / 2)) +
                        cplx(0.0, pi) * (2.0 / std::sqrt(pi)) * path.value;
    CHECK(std::abs(g_kernel(1.0, 1.0) - oracle) < 1e-10);

    // total tau-derivatives against central differences
    for (auto [k, c, tau] : {std::tuple{2.0, 0.0, 0.7}, {1.3, -45.0, 20.0}, {2.4, 45.0, 18.0}, {0.5, -2.0, 3.0}}) {
        auto G = [&](double t) { return g_kernel(k * t + c, t); };
        const double h = 1e-5 * tau;
        const cplx d1 = (G(tau + h) - G(tau - h)) / (2 * h);
        CHECK(std::abs(g_kernel_d1(k, c, tau) - d1) < 1e-6 * (1.0 + std::abs(d1)));
        const cplx a2 = g_kernel_d2(k, c, tau), f2 = g_kernel_d2_fd(k, c, tau);
        CHECK(std::abs(a2 - f2) < 1e-6 * (1.0 + std::abs(a2)));
    }
    CHECK_THROWS_AS(g_kernel(1.0, 0.0), DomainError);
}

TEST_CASE("free correlation function: moments of the reference packet") {
    const auto& C = fig6_ffcf();
    const auto& m = fig6_moments();
    const double m1 = C.moment(1), m2 = C.moment(2);
    CHECK(std::abs(m1 / m.m1 - 1.0) < 1e-2);
    CHECK(std::abs(m2 / m.m2 - 1.0) < 2e-2);
    // the quadrature is much tighter than the criteria
    CHECK(std::abs(m1 / m.m1 - 1.0) < 1e-5);
    CHECK(std::abs(m2 / m.m2 - 1.0) < 1e-7);
    CHECK(std::abs(C.normalization()) < 1e-2);
    // third moment follows the stationary flux moment, not (T^3)_kk
    const auto sm = packet_stationary_moments(fig6_packet(), fig6_region);
    CHECK(std::abs(C.moment(3) / sm.order3 - 1.0) < 1e-6);
}

TEST_CASE("free correlation function: shape for the reference packet") {
    const auto& C = fig6_ffcf();
    const auto samples = C.sample(linspace(0.5, 45.0, 500));
    const auto hump = ffcf_hump(samples, 5.0);
    const double T0 = 45.0 / 2.0;
    CHECK(std::abs(hump.centroid / T0 - 1.0) < 5e-2);
    CHECK(std::abs(C(C.tau_min())) > 1e3 * hump.peak);
    // C tracks the classical distribution over the hump
    const double pi_c = classical_dwell_distribution(fig6_packet(), fig6_region, hump.centroid);
    CHECK(std::abs(C(hump.centroid) / pi_c - 1.0) < 5e-2);
    // oscillates below the hump
    int sign_changes = 0;
    for (std::size_t i = 1; i < samples.size() && samples[i].tau < 10.0; ++i)
        if ((samples[i].value > 0) != (samples[i - 1].value > 0)) ++sign_changes;
    CHECK(sign_changes >= 2);
    // finite-difference kernel derivative over the hump
    const FreeFfcf fd(fig6_packet(), fig6_region, {}, KernelDerivative::finite_difference);
    for (double tau : {15.0, 20.0, 22.5, 27.0, 33.0}) CHECK(std::abs(fd(tau) - C(tau)) < 1e-6 * hump.peak);
    CHECK(std::abs(ffcf_free(fig6_packet(), fig6_region, 22.5) - C(22.5)) < 1e-15);
    CHECK_THROWS_AS(C(0.0), DomainError);
}

TEST_CASE("correlation moments from samples") {
    const auto& C = fig6_ffcf();
    // log-spaced below the hump, dense across it
    std::vector<double> taus;
    for (double t = C.tau_min(); t < 5.0; t *= 1.02) taus.push_back(t);
    for (double t : linspace(5.0, 400.0, 4000)) taus.push_back(t);
    const auto mom = ffcf_moments(C.sample(taus));
    const auto& m = fig6_moments();
    CHECK(std::abs(mom.m1 / m.m1 - 1.0) < 1e-2);
    CHECK(std::abs(mom.m2 / m.m2 - 1.0) < 2e-2);
    CHECK(mom.warnings.empty());
    // a density in place of C gives its own moments
    const auto psi = fig6_packet();
    std::vector<FfcfSample> dens;
    for (double t : linspace(1.0, 2000.0, 200000))
        dens.push_back({t, classical_dwell_distribution(psi, fig6_region, t), std::nullopt});
    const auto cm = ffcf_moments(dens);
    const auto ref = classical_operator_moments(psi, fig6_region);
    CHECK(std::abs(cm.m1 / ref.m1 - 1.0) < 1e-6);
    CHECK(std::abs(cm.m2 / ref.m2 - 1.0) < 1e-6);
    // truncated at the hump
    const auto cut = ffcf_moments(C.sample(linspace(5.0, 25.0, 200)));
    CHECK(!cut.warnings.empty());
}

TEST_CASE("third moment differs from the dwell-time third moment") {
    // k0 L = pi, narrow spread
    const Region D(0.0, 2.0);
    const auto psi = MomentumWavepacket::filtered_gaussian({pi / 2, 0.05, 0.5, -120.0});
    const FreeFfcf C(psi, D);
    const auto sm = packet_stationary_moments(psi, D);
    const double m3 = C.moment(3);
    CHECK(std::abs(m3 / sm.order3 - 1.0) < 1e-5);
    CHECK(std::abs(m3 / sm.order3_dwell - 1.0) > 5e-2);
    // first two still agree
    const auto m = dwell_moments_free(psi, D);
    CHECK(std::abs(C.moment(1) / m.m1 - 1.0) < 1e-2);
    CHECK(std::abs(C.moment(2) / m.m2 - 1.0) < 2e-2);
}

TEST_CASE("current density") {
    // narrow packet: J ~ (hbar k0 / m) |psi|^2 near the centre
    const auto narrow = MomentumWavepacket::filtered_gaussian({3.0, 0.01, 0.0, 0.0});
    const double rho = std::norm(numerics::propagate_free(narrow, 0.0, 0.0));
    CHECK(std::abs(current_density(narrow, 0.0, 0.0) / (3.0 * rho) - 1.0) < 1e-3);
    // every component crosses x = 10
    const auto psi = MomentumWavepacket::filtered_gaussian({2.0, 0.1, 0.0, -20.0});
    const auto flux = numerics::integrate([&](double t) { return current_density(psi, 10.0, t); }, -30.0, 120.0,
                                          {1e-12, 1e-10, 4000});
    CHECK(std::abs(flux.value - 1.0) < 1e-8);
    // real even amplitude: psi(x, 0) real, no current
    const MomentumWavepacket standing([](double k) { return cplx(std::exp(-k * k)); }, Support::full_line, -8.0,
                                      8.0, 0.5, 0.0);
    for (double x : {-1.0, 0.2, 2.5}) CHECK(std::abs(current_density(standing, x, 0.0)) < 1e-15);
    // diagonal matrix element is the current
    CHECK(std::abs(flux_matrix_element(psi, psi, 10.0, 15.0) - current_density(psi, 10.0, 15.0)) < 1e-15);
}

TEST_CASE("zeroth-order correlation") {
    const auto psi = MomentumWavepacket::filtered_gaussian({2.0, 0.2, 0.5, -30.0});
    const Region D(0.0, 100.0);
    const ZerothOrderFfcf C0(psi, D);
    CHECK(std::abs(C0.moment(0)) < 1e-10);
    // spline evaluation against direct time quadrature of the current products
    for (double tau : {10.0, 45.0, 60.0}) {
        auto f = [&](double t) {
            const double a1 = current_density(psi, 0.0, t), a2 = current_density(psi, 100.0, t);
            const double b1 = current_density(psi, 0.0, t + tau), b2 = current_density(psi, 100.0, t + tau);
            return b2 * a1 + b1 * a2 - b1 * a1 - b2 * a2;
        };
        const double direct = numerics::integrate(f, C0.t_begin(), C0.t_begin() + C0.dt() * C0.steps(),
                                                  {1e-12, 1e-9, 4000}).value;
        CHECK(std::abs(C0(tau) - direct) < 1e-6 * (std::abs(direct) + 1e-3));
    }
    // approaches the exact second moment as dk decreases
    double prev = 1.0;
    for (double dk : {0.2, 0.1, 0.05}) {
        const auto p = MomentumWavepacket::filtered_gaussian({2.0, dk, 0.5, -6.0 / dk});
        const double err = std::abs(ZerothOrderFfcf(p, D).moment(2) / dwell_moments_free(p, D).m2 - 1.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
    // reference packet: visible discrepancy
    const double e6 = std::abs(ZerothOrderFfcf(fig6_packet(), fig6_region).moment(2) / fig6_moments().m2 - 1.0);
    CHECK(e6 > 1e-2);
    CHECK_THROWS_AS(C0(-1.0), DomainError);
}

TEST_CASE("cross flux through auxiliary states") {
    const auto psi = fig6_packet();
    const auto partners = gram_schmidt_partners(psi, 3);
    REQUIRE(partners.size() == 3);
    for (std::size_t i = 0; i < partners.size(); ++i) {
        CHECK(std::abs(psi.inner(partners[i])) < 1e-12);
        CHECK(std::abs(partners[i].inner(partners[i]) - 1.0) < 1e-12);
        for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(partners[j].inner(partners[i])) < 1e-12);
    }
    const auto& q = partners[0];
    for (auto [x, t] : {std::pair{0.0, 7.5}, {45.0, 30.0}, {10.0, 12.0}}) {
        const cplx rec = cross_flux_from_diagonal(psi, q, x, t);
        const cplx direct = flux_matrix_element(psi, q, x, t);
        CHECK(std::abs(rec - direct) < 1e-9);
        CHECK(std::abs(rec) > 1e-6);
        const cplx twice = cross_flux_from_diagonal(psi, q.scaled(2.0), x, t);
        CHECK(std::abs(twice - 2.0 * rec) < 1e-10);
    }
    CHECK(std::abs(cross_flux_from_diagonal(psi, psi.scaled(0.0), 0.0, 7.5)) < 1e-15);
    CHECK_THROWS_AS(cross_flux_from_diagonal(psi, MomentumWavepacket::combine(1.0, q, 0.1, psi), 0.0, 7.5),
                    DomainError);
}
