#include "cqt/fcs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

struct Estimate {
    double value{0.0};
    double err{std::numeric_limits<double>::infinity()};
};

// Central differences for orders 1..3; each is O(h^2) accurate.
double central(int order, double h, const std::function<double(double)>& g) {
    switch (order) {
        case 1:
            return (g(h) - g(-h)) / (2.0 * h);
        case 2:
            return (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
        default:
            return (g(2.0 * h) - 2.0 * g(h) + 2.0 * g(-h) - g(-2.0 * h)) / (2.0 * h * h * h);
    }
}

}  // namespace

CumulantSet cumulants_from_cgf(const std::function<double(double)>& cgf, double h0, int order,
                               const FdOptions& options, std::span<const double> abs_floor) {
    if (order < 1 || order > 3) throw DomainError("cumulants: order must be 1, 2 or 3");
    if (!(h0 > 0.0)) throw DomainError("cumulants: finite-difference step must be positive");

    std::map<double, double> cache;
    const auto g = [&](double s) {
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
        const double v = cgf(s);
        if (v == 0.0 && s != 0.0) {
            std::ostringstream msg;
            msg << "cumulants: CGF at s = " << s << " is below the resolution of the rates";
            throw NumericalError(msg.str());
        }
        cache.emplace(s, v);
        return v;
    };

    const int orders = std::max(order, 2);
    std::array<Estimate, 3> best;
    std::array<bool, 3> done{false, false, false};
    std::array<double, 3> prev_err;
    prev_err.fill(std::numeric_limits<double>::infinity());
    double step_used = h0;

    for (int k = 0; k <= options.max_halvings; ++k) {
        const double h = h0 / std::pow(2.0, k);
        for (int n = 1; n <= orders; ++n) {
            if (done[n - 1]) continue;
            const double coarse = central(n, h, g);
            const double fine = central(n, 0.5 * h, g);
            const Estimate e{(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
            if (e.err > prev_err[n - 1]) {
                // Round-off now dominates; keep the previous estimate.
                done[n - 1] = true;
                continue;
            }
            prev_err[n - 1] = e.err;
            best[n - 1] = e;
            if (n == 1) step_used = h;
            const double floor = n <= static_cast<int>(abs_floor.size()) ? abs_floor[n - 1] : 0.0;
            if (e.err <= options.rel_tolerance * std::abs(e.value) || e.err <= floor) {
                done[n - 1] = true;
            }
        }
        if (std::all_of(done.begin(), done.begin() + orders, [](bool d) { return d; })) break;
    }

    for (int n = 1; n <= order; ++n) {
        const Estimate& e = best[n - 1];
        const double floor = n <= static_cast<int>(abs_floor.size()) ? abs_floor[n - 1] : 0.0;
        // Accept anything within 100x the requested tolerance once round-off dominates.
        const double allowed = 100.0 * std::max(options.rel_tolerance * std::abs(e.value), floor);
        if (!std::isfinite(e.value) || e.err > allowed) {
            std::ostringstream msg;
            msg << "cumulant of order " << n << " did not converge: estimate " << e.value
                << ", error estimate " << e.err << " (allowed " << allowed << ")";
            throw NumericalError(msg.str());
        }
    }

    CumulantSet out;
    out.fd_step = step_used;
    out.flux = best[0].value;
    out.err_flux = best[0].err;
    out.noise = best[1].value;
    out.err_noise = best[1].err;
    if (order >= 3) {
        out.c3 = best[2].value;
        out.err_c3 = best[2].err;
    }
    out.ff = std::abs(out.flux) > out.err_flux ? out.noise / out.flux
                                               : std::numeric_limits<double>::quiet_NaN();
    return out;
}

CgfEvaluator::CgfEvaluator(RateTable rates, JumpMoments moments)
    : rates_(std::move(rates)), moments_(std::move(moments)) {
    steady_ = steady_state(build_generator(rates_));
}

double CgfEvaluator::operator()(double s) const {
    if (s == 0.0) return 0.0;
    const TiltedGenerator gen = build_generator(rates_, moments_, s);
    return rates_.prefactor * dominant_eigenvalue(gen).value;
}

CumulantSet cumulants_fd(const RateTable& rates, const JumpMoments& moments, int order,
                         const FdOptions& options) {
    const CgfEvaluator cgf(rates, moments);
    const double scale = std::max(moments.tilt_scale(), 1.0);
    const double h0 = options.step > 0.0 ? options.step : 1e-3 / scale;
    std::array<double, 3> floors{};
    for (int n = 1; n <= 3; ++n) {
        floors[n - 1] = options.abs_tolerance * rates.max_rate() * std::pow(scale, n);
    }
    return cumulants_from_cgf(std::cref(cgf), h0, order, options, floors);
}

CumulantSet cumulants_fd(const ModelParams& params, int order, const FdOptions& options) {
    const Ladder ladder = build_ladder(params);
    return cumulants_fd(marcus_rates(ladder, params.baths), jump_moments(ladder, params.baths),
                        order, options);
}

double flux_direct(const RateTable& rates, const JumpMoments& moments, const SteadyState& ss) {
    const std::size_t links = rates.links();
    if (moments.q_plus.size() != links || moments.q_minus.size() != links ||
        ss.populations.size() != links + 1) {
        throw DomainError("flux_direct: rate, moment and population tables are inconsistent");
    }
    double j = 0.0;
    for (std::size_t k = 0; k < links; ++k) {
        j += moments.q_plus[k] * rates.kappa_plus[k] * ss.populations[k] +
             moments.q_minus[k] * rates.kappa_minus[k] * ss.populations[k + 1];
    }
    return j;
}

double flux_direct(const ModelParams& params) {
    const Ladder ladder = build_ladder(params);
    const RateTable rates = marcus_rates(ladder, params.baths);
    return flux_direct(rates, jump_moments(ladder, params.baths),
                       steady_state(build_generator(rates)));
}

double gc_deviation(const ModelParams& params, std::span<const double> s_samples) {
    const Ladder ladder = build_ladder(params);
    const CgfEvaluator cgf(marcus_rates(ladder, params.baths), jump_moments(ladder, params.baths));
    const double axis = -cgf.moments().beta_bias;
    // G vanishes at s = 0 and its mirror; there the rate scale is the reference.
    const double floor = 1e-6 * cgf.rates().max_rate();
    double worst = 0.0;
    for (double s : s_samples) {
        const double a = cgf(s);
        const double b = cgf(axis - s);
        const double denom = std::max({std::abs(a), std::abs(b), floor});
        worst = std::max(worst, std::abs(a - b) / denom);
    }
    return worst;
}

}  // namespace cqt
