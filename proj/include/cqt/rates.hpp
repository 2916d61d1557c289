// rates.hpp: Marcus-limit transition rates between neighbouring Dicke levels.
//
// kappa+_m drives m -> m+1, kappa-_m drives m+1 -> m, both carrying g+_m:
//
//   kappa+-_m = (Delta/2)^2 g+_m sqrt(pi/W) exp[-(Delta_m +- xi_S +- xi_D)^2 / (4W)],
//   W = T_S xi_S + T_D xi_D.
//
// The counting field chi counts energy deposited in the drain. On the real tilt
// axis s = i chi every tilted rate is kappa * exp(q s + D s^2), where q are the
// per-jump drain-energy moments and D = T_S T_D xi_S xi_D / W.

#pragma once

#include <complex>
#include <vector>

#include "cqt/model.hpp"

namespace cqt {

struct RateTable {
    std::vector<double> kappa_plus;   // indexed by link, m = -j..j-1
    std::vector<double> kappa_minus;
    double w{0.0};          // T_S xi_S + T_D xi_D
    double prefactor{0.0};  // A = (Delta/2)^2 sqrt(pi / W)

    std::size_t links() const { return kappa_plus.size(); }
    double max_rate() const;
    // Multiplies A and every rate by c.
    RateTable rescaled(double c) const;
};

struct TiltedRateTable {
    std::vector<std::complex<double>> kappa_plus_chi;
    std::vector<std::complex<double>> kappa_minus_chi;
    std::complex<double> chi;
};

// Real-axis tilt. `excess_*` hold kappa * expm1(q s + D s^2) so that
// kappa(s) - kappa(0) is available without cancellation.
struct RealTiltedRates {
    std::vector<double> kappa_plus;
    std::vector<double> kappa_minus;
    std::vector<double> excess_plus;
    std::vector<double> excess_minus;
    double s{0.0};
};

struct JumpMoments {
    std::vector<double> q_plus;   // mean drain energy gain per m -> m+1 jump
    std::vector<double> q_minus;  // ... per m+1 -> m jump
    double d{0.0};                // T_S T_D xi_S xi_D / W
    double beta_bias{0.0};        // beta_D - beta_S

    // Largest |q| together with sqrt(D); sets the natural tilt scale.
    double tilt_scale() const;
};

// Gaussian (Marcus) bath density sqrt(pi beta/xi) exp[-beta (omega - xi)^2 / (4 xi)].
double marcus_density(const BathParams& bath, double omega);

RateTable marcus_rates(const Ladder& ladder, const BathPair& baths);

TiltedRateTable tilted_rates(const Ladder& ladder, const BathPair& baths,
                             std::complex<double> chi);

JumpMoments jump_moments(const Ladder& ladder, const BathPair& baths);

RealTiltedRates tilted_rates_real(const RateTable& rates, const JumpMoments& moments,
                                  double s);
RealTiltedRates tilted_rates_real(const Ladder& ladder, const BathPair& baths, double s);

}  // namespace cqt
