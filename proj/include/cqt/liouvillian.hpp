// liouvillian.hpp: tridiagonal tilted generator of the ladder kinetics.
//
// dP/dt = W(s) P with
//   W_{m,m}   = -(kappa-_{m-1} + kappa+_m)        (never tilted)
//   W_{m+1,m} = kappa+_m(s)                        (lower)
//   W_{m,m+1} = kappa-_m(s)                        (upper)
// All entries are stored divided by the rate prefactor A (`scale`).

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cqt/model.hpp"
#include "cqt/rates.hpp"

namespace cqt {

struct TiltedGenerator {
    std::size_t dim{0};
    std::vector<double> diag;
    std::vector<double> lower;
    std::vector<double> upper;
    // Untilted off-diagonals, and lower/upper minus them computed without
    // subtraction.
    std::vector<double> base_lower;
    std::vector<double> base_upper;
    std::vector<double> lower_excess;
    std::vector<double> upper_excess;
    double tilt{0.0};
    double scale{1.0};

    double max_rate() const;  // in units of scale
    Eigen::MatrixXd dense() const;
    // Column sums of W(0): -(diag + untilted off-diagonals).
    std::vector<double> column_sums() const;
};

struct SteadyState {
    std::vector<double> populations;
    double residual{0.0};  // ||W(0) P||_inf / max rate
};

struct PerronResult {
    double value{0.0};             // G(s), in units of the generator scale
    std::vector<double> vector;    // positive, sums to 1
    double residual{0.0};          // ||(W - G) v||_inf / (max rate ||v||_inf)
    int iterations{0};             // bisection steps
};

TiltedGenerator build_generator(const RateTable& rates);
TiltedGenerator build_generator(const RateTable& rates, const RealTiltedRates& tilted);
TiltedGenerator build_generator(const RateTable& rates, const JumpMoments& moments, double s);
// Requires chi purely imaginary (real tilt s = i chi); other values are rejected.
TiltedGenerator build_generator(const RateTable& rates, const TiltedRateTable& tilted);

SteadyState steady_state(const TiltedGenerator& gen);

// Level-independent approximation valid for xi << |eps0|: geometric
// distribution P_m ~ y^m with y = gamma+ / gamma-.
std::vector<double> analytic_population(const SystemParams& sys, const BathPair& baths);
std::vector<double> geometric_population(int n_qubits, double y);

struct PerronOptions {
    int max_iterations{4000};
    double residual_tolerance{1e-10};
};

// Perron root of a real-tilt generator. The spectrum depends on the tilt only
// through the link products lower_k upper_k = b_k a_{k+1} (1 + eta_k), so the
// root is bracketed by bisection on the signs of the LDL^T pivots of
// (lambda - W), written in terms of eta_k. No pivot subtracts two O(1) numbers
// to form G, which keeps relative accuracy when G is many orders below the
// rates and when slow modes are degenerate to rounding. The vector follows
// from the same pivots and is positive.
PerronResult dominant_eigenvalue(const TiltedGenerator& gen, const PerronOptions& options = {});

// Long-time propagation by repeated squaring of a Pade step; a cross-check for
// steady_state only.
std::vector<double> propagate_to_stationarity(const TiltedGenerator& gen, double t_final);

}  // namespace cqt
