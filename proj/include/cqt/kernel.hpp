// kernel.hpp: bath propagator Q(t), correlation spectrum C(omega) and rates
// from numerical quadrature, beyond the short-time (Marcus) expansion.
//
//   Q(t) = (1/pi) int_0^inf dw J(w)/w^2 [coth(beta w/2)(1 - cos wt) + i sin wt],
//   J(w) = alpha w exp(-w/omega_c),
//   C(w) = int dt exp(i w t - Q(t)).
//
// Im Q has the closed form (alpha/pi) atan(omega_c t). For Re Q the 2/(beta w)
// pole of coth is integrated analytically and the smooth remainder by
// quadrature (Gauss-Kronrod at short times, Ooura's double-exponential Fourier
// rule otherwise).

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "cqt/model.hpp"
#include "cqt/rates.hpp"

namespace cqt {

struct KernelGridSpec {
    double dt{0.01};
    double t_max{0.0};  // 0: smallest grid time with Re Q >= re_q_target
    double re_q_target{30.0};
    std::size_t max_time_points{1u << 20};
    double d_omega{0.01};  // upper bound on the spectral resolution
    double truncation_threshold{1e-10};  // max allowed exp(-Re Q(t_max))
    double quad_tolerance{1e-8};         // absolute, per propagator point
};

struct PropagatorGrid {
    BathParams bath;
    double dt{0.0};
    double t_max{0.0};
    std::vector<double> times;
    std::vector<std::complex<double>> q_values;
    double max_error{0.0};
};

// Spectrum sampled at omega_k = k d_omega, k = -half..half.
struct CorrelationSpectrum {
    double d_omega{0.0};
    std::size_t half{0};
    std::vector<double> omegas;
    std::vector<double> c_values;
    double truncation{0.0};  // exp(-Re Q(t_max)) of the source propagator

    // Degree-5 Lagrange interpolation; zero outside the grid.
    double value_at(double omega) const;
    // (1/2pi) sum C d_omega.
    double sum_rule() const;
};

struct QuadratureValue {
    std::complex<double> value;
    double error{0.0};
};

// Pointwise evaluation of Q(t) for one bath. Not thread-safe (the Fourier
// integrator caches its nodes); use one instance per thread.
class BathPropagator {
public:
    explicit BathPropagator(const BathParams& bath, double tolerance = 1e-8);
    ~BathPropagator();
    BathPropagator(BathPropagator&&) noexcept;
    BathPropagator& operator=(BathPropagator&&) noexcept;

    // Q(t) for t >= 0; Q(-t) = conj(Q(t)).
    std::complex<double> operator()(double t, double* error = nullptr) const;
    const BathParams& bath() const { return bath_; }

private:
    struct Impl;
    BathParams bath_;
    std::unique_ptr<Impl> impl_;
};

PropagatorGrid propagator(const BathParams& bath, const KernelGridSpec& spec = {});

CorrelationSpectrum spectrum(const PropagatorGrid& grid, const KernelGridSpec& spec = {});

// The Gaussian Marcus density sampled on the same grid as `like`.
CorrelationSpectrum marcus_spectrum_like(const BathParams& bath, const CorrelationSpectrum& like);

// (1/2pi) int |C_a - C_b| d omega on a shared grid.
double spectrum_l1_distance(const CorrelationSpectrum& a, const CorrelationSpectrum& b);

// max over omega > 0 of |C(-omega) e^{omega/T} / C(omega) - 1|, restricted to
// frequencies where both C(omega) and C(-omega) exceed rel_floor * max C.
double kms_deviation(const CorrelationSpectrum& c, double temperature, double rel_floor = 1e-3);

// Rate for the ladder level `level` (m = -j + level) by trapezoidal quadrature
// of the two-bath convolution; `error` compares against the half-density
// trapezoid. The top level (g+_j = 0) returns exactly zero.
QuadratureValue exact_rate(const Ladder& ladder, const CorrelationSpectrum& source,
                           const CorrelationSpectrum& drain, std::size_t level, LadderSign sign,
                           std::complex<double> chi = {0.0, 0.0});

// Same rate from the time-domain form
//   (Delta/2)^2 g+_m int dtau exp(-Q_S(tau) - Q_D(tau - chi)) exp(-+ i Delta_m tau).
QuadratureValue exact_rate_time_domain(const Ladder& ladder, const BathPair& baths,
                                       std::size_t level, LadderSign sign, double chi,
                                       const KernelGridSpec& spec = {});

struct ExactRates {
    RateTable rates;       // prefactor set to the Marcus A for comparability
    JumpMoments moments;   // q from the kernel means; d is not defined here (0)
    std::vector<double> err_plus;
    std::vector<double> err_minus;
};

ExactRates exact_rate_table(const Ladder& ladder, const BathPair& baths,
                            const CorrelationSpectrum& source, const CorrelationSpectrum& drain);

}  // namespace cqt
