// fcs.hpp: cumulants of the energy current into the drain.
//
// G(s) is the Perron root of W(s) in physical units (the generator scale A
// multiplied back). Cumulants are d^n G / ds^n at s = 0 on the real tilt axis.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cqt/liouvillian.hpp"
#include "cqt/model.hpp"
#include "cqt/rates.hpp"

namespace cqt {

struct FdOptions {
    double step{0.0};          // 0 selects 1e-3 / max(|q|, sqrt(D), Delta)
    int max_halvings{6};
    double rel_tolerance{1e-6};
    // Absolute floor, relative to (max rate) * (tilt scale)^n for order n.
    double abs_tolerance{1e-9};
};

struct CumulantSet {
    double flux{0.0};
    double noise{0.0};
    std::optional<double> c3;
    double ff{0.0};  // noise / flux; NaN when |flux| <= err_flux
    double fd_step{0.0};
    double err_flux{0.0};
    double err_noise{0.0};
    std::optional<double> err_c3;
};

// Generic finite-difference engine: central stencils at h and h/2 with
// Richardson extrapolation, halving h until the error estimate settles.
// `abs_floor[n-1]` is the absolute tolerance for the n-th cumulant.
CumulantSet cumulants_from_cgf(const std::function<double(double)>& cgf, double h0, int order,
                               const FdOptions& options, std::span<const double> abs_floor = {});

// Scaled CGF of one parameter point.
class CgfEvaluator {
public:
    CgfEvaluator(RateTable rates, JumpMoments moments);

    double operator()(double s) const;
    const RateTable& rates() const { return rates_; }
    const JumpMoments& moments() const { return moments_; }
    const SteadyState& steady() const { return steady_; }

private:
    RateTable rates_;
    JumpMoments moments_;
    SteadyState steady_;
};

CumulantSet cumulants_fd(const RateTable& rates, const JumpMoments& moments, int order = 2,
                         const FdOptions& options = {});
CumulantSet cumulants_fd(const ModelParams& params, int order = 2, const FdOptions& options = {});

// J = sum_m [q+_m kappa+_m P_m + q-_m kappa-_m P_{m+1}].
double flux_direct(const RateTable& rates, const JumpMoments& moments, const SteadyState& ss);
double flux_direct(const ModelParams& params);

// max over samples of |G(s) - G(-(beta_D - beta_S) - s)| / max(|G(s)|, |G(s')|),
// with the denominator floored at 1e-6 of the largest rate: where G itself is
// at the rounding level of the rates only absolute agreement is meaningful.
double gc_deviation(const ModelParams& params, std::span<const double> s_samples);

}  // namespace cqt
