#include "cqt/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

struct MarcusScales {
    double xi_s;
    double xi_d;
    double w;
    double d;
    double source_weight;  // T_S xi_S / W, equal to D / (T_D xi_D) when xi_D > 0
    double inv_t_source;
};

MarcusScales marcus_scales(const Ladder& ladder, const BathPair& baths) {
    baths.validate();
    MarcusScales sc{};
    sc.xi_s = baths.source.xi();
    sc.xi_d = baths.drain.xi();
    const double xi = sc.xi_s + sc.xi_d;
    if (std::abs(xi - ladder.xi_total) > 1e-12 * std::max(1.0, xi)) {
        throw DomainError("ladder was built with a different reorganization energy");
    }
    sc.w = baths.source.temperature * sc.xi_s + baths.drain.temperature * sc.xi_d;
    if (!(sc.w > 0.0)) {
        throw SingularBathError("Marcus rates need T_S xi_S + T_D xi_D > 0 (all couplings are zero)");
    }
    const double ts_xs = baths.source.temperature * sc.xi_s;
    const double td_xd = baths.drain.temperature * sc.xi_d;
    sc.d = ts_xs * td_xd / sc.w;
    sc.source_weight = ts_xs / sc.w;
    sc.inv_t_source = 1.0 / baths.source.temperature;
    return sc;
}

double log_prefactor(const Ladder& ladder, double w) {
    const double half = 0.5 * ladder.tunneling;
    return std::log(half * half) + 0.5 * std::log(std::numbers::pi / w);
}

// Linear coefficient of i*chi inside the counting factor, sign = +1 for kappa+.
double counting_drift(const MarcusScales& sc, double gap, double sign) {
    return sc.d * sc.inv_t_source + sc.source_weight * (-sign * gap - sc.xi_d);
}

void check_links(const Ladder& ladder) {
    if (ladder.gaps.size() + 1 != ladder.g_plus.size()) {
        throw DomainError("malformed ladder: gaps and levels disagree");
    }
}

}  // namespace

double RateTable::max_rate() const {
    double r = 0.0;
    for (double k : kappa_plus) r = std::max(r, k);
    for (double k : kappa_minus) r = std::max(r, k);
    return r;
}

RateTable RateTable::rescaled(double c) const {
    RateTable out = *this;
    out.prefactor *= c;
    for (double& k : out.kappa_plus) k *= c;
    for (double& k : out.kappa_minus) k *= c;
    return out;
}

double JumpMoments::tilt_scale() const {
    double s = std::sqrt(d);
    for (double q : q_plus) s = std::max(s, std::abs(q));
    for (double q : q_minus) s = std::max(s, std::abs(q));
    return s;
}

double marcus_density(const BathParams& bath, double omega) {
    bath.validate();
    const double xi = bath.xi();
    if (!(xi > 0.0)) {
        throw SingularBathError("marcus_density: bath has zero reorganization energy");
    }
    const double beta = bath.beta();
    const double x = omega - xi;
    return std::sqrt(std::numbers::pi * beta / xi) * std::exp(-beta * x * x / (4.0 * xi));
}

RateTable marcus_rates(const Ladder& ladder, const BathPair& baths) {
    check_links(ladder);
    const MarcusScales sc = marcus_scales(ladder, baths);
    const double log_a = log_prefactor(ladder, sc.w);
    const double xi = sc.xi_s + sc.xi_d;

    RateTable table;
    table.w = sc.w;
    table.prefactor = std::exp(log_a);
    const std::size_t n = ladder.links();
    table.kappa_plus.resize(n);
    table.kappa_minus.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double log_g = std::log(ladder.g_plus[k]);
        const double up = ladder.gaps[k] + xi;
        const double down = ladder.gaps[k] - xi;
        // Exponentiate last: deep off-resonance underflows to 0, never NaN.
        table.kappa_plus[k] = std::exp(log_a + log_g - up * up / (4.0 * sc.w));
        table.kappa_minus[k] = std::exp(log_a + log_g - down * down / (4.0 * sc.w));
    }
    return table;
}

TiltedRateTable tilted_rates(const Ladder& ladder, const BathPair& baths,
                             std::complex<double> chi) {
    check_links(ladder);
    const MarcusScales sc = marcus_scales(ladder, baths);
    const double log_a = log_prefactor(ladder, sc.w);
    const double xi = sc.xi_s + sc.xi_d;
    const std::complex<double> i_chi{-chi.imag(), chi.real()};

    TiltedRateTable table;
    table.chi = chi;
    const std::size_t n = ladder.links();
    table.kappa_plus_chi.resize(n);
    table.kappa_minus_chi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double gap = ladder.gaps[k];
        const double log_g = std::log(ladder.g_plus[k]);
        for (double sign : {1.0, -1.0}) {
            const double shift = gap + sign * xi;
            const std::complex<double> exponent =
                log_a + log_g - shift * shift / (4.0 * sc.w)  // untilted rate
                - sign * gap * i_chi                          // -+ i Delta_m chi
                - (i_chi * counting_drift(sc, gap, sign) + sc.d * chi * chi);
            (sign > 0 ? table.kappa_plus_chi : table.kappa_minus_chi)[k] = std::exp(exponent);
        }
    }
    return table;
}

JumpMoments jump_moments(const Ladder& ladder, const BathPair& baths) {
    check_links(ladder);
    const MarcusScales sc = marcus_scales(ladder, baths);
    JumpMoments mom;
    mom.d = sc.d;
    mom.beta_bias = baths.drain.beta() - baths.source.beta();
    const std::size_t n = ladder.links();
    mom.q_plus.resize(n);
    mom.q_minus.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double gap = ladder.gaps[k];
        mom.q_plus[k] = -gap - counting_drift(sc, gap, 1.0);
        mom.q_minus[k] = gap - counting_drift(sc, gap, -1.0);
    }
    return mom;
}

RealTiltedRates tilted_rates_real(const RateTable& rates, const JumpMoments& moments,
                                  double s) {
    const std::size_t n = rates.links();
    if (rates.kappa_minus.size() != n || moments.q_plus.size() != n ||
        moments.q_minus.size() != n) {
        throw DomainError("tilted_rates_real: rate and moment tables differ in length");
    }
    RealTiltedRates out;
    out.s = s;
    out.kappa_plus.resize(n);
    out.kappa_minus.resize(n);
    out.excess_plus.resize(n);
    out.excess_minus.resize(n);
    const double quad = moments.d * s * s;
    for (std::size_t k = 0; k < n; ++k) {
        const double ep = moments.q_plus[k] * s + quad;
        const double em = moments.q_minus[k] * s + quad;
        out.kappa_plus[k] = rates.kappa_plus[k] * std::exp(ep);
        out.kappa_minus[k] = rates.kappa_minus[k] * std::exp(em);
        out.excess_plus[k] = rates.kappa_plus[k] * std::expm1(ep);
        out.excess_minus[k] = rates.kappa_minus[k] * std::expm1(em);
    }
    return out;
}

RealTiltedRates tilted_rates_real(const Ladder& ladder, const BathPair& baths, double s) {
    return tilted_rates_real(marcus_rates(ladder, baths), jump_moments(ladder, baths), s);
}

}  // namespace cqt
