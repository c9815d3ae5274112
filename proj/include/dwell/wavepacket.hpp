#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "dwell/numerics.hpp"
#include "dwell/units.hpp"

namespace dwell {

enum class Support { positive, full_line };

// Parameters of the filtered Gaussian family
//   N (1 - exp(-alpha k^2)) exp(-(k-k0)^2 / (4 dk^2)) exp(-i k x0),  k > 0.
struct FilteredGaussianParams {
    double k0 = 2.0;
    double dk = 0.4;
    double alpha = 0.5;
    double x0 = -15.0;
};

// Momentum amplitude psi~(k) with the k-window outside of which it is
// negligible. The window and scale are used to size quadrature rules.
class MomentumWavepacket {
public:
    using Amplitude = std::function<cplx(double)>;

    MomentumWavepacket(Amplitude amplitude, Support support, double k_lo, double k_hi,
                       double k_scale, double x_center, bool normalize = true);

    static MomentumWavepacket filtered_gaussian(const FilteredGaussianParams& p);

    cplx operator()(double k) const;
    double density(double k) const { return std::norm((*this)(k)); }

    Support support() const { return support_; }
    double k_lo() const { return k_lo_; }
    double k_hi() const { return k_hi_; }
    double k_scale() const { return k_scale_; }
    double x_center() const { return x_center_; }
    double normalization() const { return norm_factor_; }
    const std::optional<FilteredGaussianParams>& params() const { return params_; }

    // ||psi||^2 by quadrature over the window.
    double norm2() const;

    // psi~(k) exp(-i hbar k^2 t / 2m): free evolution by t.
    MomentumWavepacket evolved(double t, const UnitSystem& units = {}) const;
    MomentumWavepacket scaled(cplx c) const;

    // a*psi + b*phi, unnormalised; window is the union of both.
    static MomentumWavepacket combine(cplx a, const MomentumWavepacket& psi, cplx b,
                                      const MomentumWavepacket& phi);

    // Composite Gauss rule over the window, dense enough for the amplitude
    // and for phase slopes up to `phase_slope` (radians per unit k).
    numerics::CompositeRule rule(double phase_slope = 0.0) const;

    // <this|other> in momentum space.
    cplx inner(const MomentumWavepacket& other) const;

private:
    Amplitude amp_;
    Support support_;
    double k_lo_, k_hi_, k_scale_, x_center_;
    double norm_factor_ = 1.0;
    double extra_slope_ = 0.0;
    std::optional<FilteredGaussianParams> params_;
};

namespace numerics {

/// psi(x, t) = (2 pi)^(-1/2) Int dk psi~(k) exp(i(kx - hbar k^2 t / 2m)).
cplx propagate_free(const MomentumWavepacket& psi, double x, double t, const UnitSystem& units = {});

/// Same integral by adaptive quadrature; slower, used as a cross-check.
cplx propagate_free_adaptive(const MomentumWavepacket& psi, double x, double t,
                             const UnitSystem& units = {}, double rel_tol = 1e-10);

// Batch evaluation of psi and d psi/dx for many (x, t) with |x - x_center|
// and |t| bounded; the quadrature nodes and amplitudes are computed once.
class FreePropagator {
public:
    FreePropagator(const MomentumWavepacket& psi, double max_dx, double max_t,
                   const UnitSystem& units = {});
    cplx value(double x, double t) const;
    std::pair<cplx, cplx> value_and_dx(double x, double t) const;
    std::size_t nodes() const { return k_.size(); }

private:
    std::vector<double> k_;
    std::vector<cplx> a_;  // weight * amplitude / sqrt(2 pi)
    double nu_;
};

}  // namespace numerics
}  // namespace dwell
