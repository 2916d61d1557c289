#include "cqt/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUpperCutoffs = 60.0;  // integrate to 60 omega_c; exp(-60) ~ 1e-26
constexpr double kShortTime = 2.0;      // omega_c t below which Gauss-Kronrod is used

// coth(x) - 1/x without cancellation at small x.
double coth_minus_inverse(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)));
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

// Planner calls into FFTW are not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::optional<double> adaptive_t_max(const BathPropagator& q, const KernelGridSpec& spec) {
    const BathParams& bath = q.bath();
    if (!(bath.alpha > 0.0)) return std::nullopt;
    const double limit = spec.dt * static_cast<double>(spec.max_time_points);
    // Re Q grows like alpha T t at long times.
    double t = std::max(spec.dt, 0.5 * spec.re_q_target / (bath.alpha * bath.temperature));
    while (t <= limit) {
        if (q(t).real() >= spec.re_q_target) {
            return std::ceil(t / spec.dt - 1e-9) * spec.dt;
        }
        t *= 1.5;
    }
    return std::nullopt;
}

void check_grid_spec(const KernelGridSpec& spec) {
    if (!(spec.dt > 0.0)) throw DomainError("kernel grid: dt must be positive");
    if (!(spec.d_omega > 0.0)) throw DomainError("kernel grid: d_omega must be positive");
    if (spec.t_max < 0.0) throw DomainError("kernel grid: t_max must be non-negative");
    if (!(spec.re_q_target > 0.0)) throw DomainError("kernel grid: re_q_target must be positive");
}

[[noreturn]] void throw_outside_validity(const BathParams& bath, const KernelGridSpec& spec) {
    std::ostringstream msg;
    msg << to_string(bath.label) << " bath (alpha=" << bath.alpha << ", T=" << bath.temperature
        << "): propagator does not decay to exp(-" << spec.re_q_target << ") within "
        << spec.max_time_points << " time points; parameters are outside NIBA validity";
    throw NumericalError(msg.str());
}

void check_same_grid(const CorrelationSpectrum& a, const CorrelationSpectrum& b) {
    if (a.half != b.half || a.c_values.size() != b.c_values.size() ||
        std::abs(a.d_omega - b.d_omega) > 1e-12 * a.d_omega) {
        throw DomainError("spectra are sampled on different frequency grids");
    }
}

double gap_of(const Ladder& ladder, std::size_t level, double& g) {
    if (level >= ladder.levels()) throw DomainError("exact rate: level index out of range");
    g = ladder.g_plus[level];
    if (g == 0.0) return 0.0;
    return ladder.gaps.at(level);
}

}  // namespace

struct BathPropagator::Impl {
    double alpha;
    double omega_c;
    double beta;
    double tolerance;
    double remainder_total;  // int_0^inf f(w) dw
    boost::math::quadrature::ooura_fourier_cos<double> fourier;

    Impl(const BathParams& bath, double tol)
        : alpha(bath.alpha),
          omega_c(bath.omega_c),
          beta(bath.beta()),
          tolerance(tol),
          remainder_total(0.0),
          fourier(1e-12, 4) {
        double err = 0.0;
        remainder_total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [this](double w) { return smooth(w); }, 0.0, kUpperCutoffs * omega_c, 15, 1e-14,
            &err);
    }

    // exp(-w/omega_c) (coth(beta w/2) - 2/(beta w)) / w, finite at w = 0.
    double smooth(double w) const {
        if (w <= 0.0) return beta / 6.0;
        const double x = 0.5 * beta * w;
        return std::exp(-w / omega_c) * coth_minus_inverse(x) / w;
    }

    // int_0^inf f(w) (1 - cos wt) dw
    double remainder(double t, double& err) {
        if (omega_c * t <= kShortTime) {
            const auto integrand = [this, t](double w) {
                const double s = std::sin(0.5 * w * t);
                return smooth(w) * 2.0 * s * s;
            };
            return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                integrand, 0.0, kUpperCutoffs * omega_c, 15, 1e-13, &err);
        }
        const auto [cos_part, cos_err] = fourier.integrate([this](double w) { return smooth(w); }, t);
        err = cos_err;
        return remainder_total - cos_part;
    }
};

BathPropagator::BathPropagator(const BathParams& bath, double tolerance) : bath_(bath) {
    bath.validate();
    if (!(tolerance > 0.0)) throw DomainError("propagator tolerance must be positive");
    impl_ = std::make_unique<Impl>(bath, tolerance);
}

BathPropagator::~BathPropagator() = default;
BathPropagator::BathPropagator(BathPropagator&&) noexcept = default;
BathPropagator& BathPropagator::operator=(BathPropagator&&) noexcept = default;

std::complex<double> BathPropagator::operator()(double t, double* error) const {
    if (t < 0.0) return std::conj((*this)(-t, error));
    const Impl& p = *impl_;
    if (p.alpha == 0.0 || t == 0.0) {
        if (error) *error = 0.0;
        return {0.0, 0.0};
    }
    const double wct = p.omega_c * t;
    const double im = (p.alpha / kPi) * std::atan(wct);
    // (2/beta) int_0^inf exp(-w/wc) (1 - cos wt) / w^2 dw
    const double pole = (2.0 / p.beta) * (t * std::atan(wct) - std::log1p(wct * wct) / (2.0 * p.omega_c));
    double err = 0.0;
    const double rem = impl_->remainder(t, err);
    const double scaled_err = (p.alpha / kPi) * err;
    if (scaled_err > p.tolerance) {
        std::ostringstream msg;
        msg << "propagator quadrature at t=" << t << " has error estimate " << scaled_err
            << " above tolerance " << p.tolerance;
        throw NumericalError(msg.str());
    }
    if (error) *error = scaled_err;
    return {(p.alpha / kPi) * (pole + rem), im};
}

double CorrelationSpectrum::value_at(double omega) const {
    if (c_values.empty()) return 0.0;
    const double x = omega / d_omega + static_cast<double>(half);
    const double last = static_cast<double>(c_values.size() - 1);
    if (x < 0.0 || x > last) return 0.0;
    constexpr int kPoints = 6;
    long start = static_cast<long>(std::floor(x)) - kPoints / 2 + 1;
    start = std::clamp(start, 0L, static_cast<long>(c_values.size()) - kPoints);
    const double u = x - static_cast<double>(start);
    double sum = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        double li = 1.0;
        for (int k = 0; k < kPoints; ++k) {
            if (k != i) li *= (u - k) / static_cast<double>(i - k);
        }
        sum += li * c_values[static_cast<std::size_t>(start + i)];
    }
    return sum;
}

double CorrelationSpectrum::sum_rule() const {
    double s = 0.0;
    for (double c : c_values) s += c;
    return s * d_omega / (2.0 * kPi);
}

PropagatorGrid propagator(const BathParams& bath, const KernelGridSpec& spec) {
    check_grid_spec(spec);
    const BathPropagator q(bath, spec.quad_tolerance);
    double t_max = spec.t_max;
    if (t_max == 0.0) {
        const auto adaptive = adaptive_t_max(q, spec);
        if (!adaptive) throw_outside_validity(bath, spec);
        t_max = *adaptive;
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_max / spec.dt));
    if (steps + 1 > spec.max_time_points) throw_outside_validity(bath, spec);

    PropagatorGrid grid;
    grid.bath = bath;
    grid.dt = spec.dt;
    grid.t_max = static_cast<double>(steps) * spec.dt;
    grid.times.resize(steps + 1);
    grid.q_values.resize(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * spec.dt;
        double err = 0.0;
        grid.times[n] = t;
        grid.q_values[n] = q(t, &err);
        grid.max_error = std::max(grid.max_error, err);
    }
    return grid;
}

CorrelationSpectrum spectrum(const PropagatorGrid& grid, const KernelGridSpec& spec) {
    check_grid_spec(spec);
    if (grid.q_values.size() < 2) throw DomainError("spectrum: propagator grid is empty");
    const double tail = std::exp(-grid.q_values.back().real());
    if (tail > spec.truncation_threshold) {
        std::ostringstream msg;
        msg << "spectrum: exp(-Re Q(t_max)) = " << tail << " exceeds the truncation threshold "
            << spec.truncation_threshold << "; increase t_max";
        throw NumericalError(msg.str());
    }

    const std::size_t m = grid.q_values.size();
    std::size_t n = 1;
    const double needed = 2.0 * kPi / (grid.dt * spec.d_omega);
    while (n < 2 * m || static_cast<double>(n) < needed) n <<= 1;

    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw NumericalError("spectrum: FFT buffer allocation failed");
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (k < m) {
            const std::complex<double> kv = std::exp(-grid.q_values[k]);
            buf[k][0] = kv.real();
            buf[k][1] = kv.imag();
        } else {
            buf[k][0] = 0.0;
            buf[k][1] = 0.0;
        }
    }
    const double k0 = std::exp(-grid.q_values[0].real()) * std::cos(grid.q_values[0].imag());
    fftw_execute(plan);

    // K(-t) = conj K(t), so the two-sided sum is 2 Re(one-sided) - K(0).
    CorrelationSpectrum out;
    out.half = n / 2 - 1;
    out.d_omega = 2.0 * kPi / (static_cast<double>(n) * grid.dt);
    out.truncation = tail;
    out.omegas.resize(2 * out.half + 1);
    out.c_values.resize(2 * out.half + 1);
    for (std::size_t i = 0; i < out.omegas.size(); ++i) {
        const long k = static_cast<long>(i) - static_cast<long>(out.half);
        const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : n - static_cast<std::size_t>(-k);
        out.omegas[i] = static_cast<double>(k) * out.d_omega;
        out.c_values[i] = grid.dt * (2.0 * buf[idx][0] - k0);
    }
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

CorrelationSpectrum marcus_spectrum_like(const BathParams& bath, const CorrelationSpectrum& like) {
    CorrelationSpectrum out = like;
    out.truncation = 0.0;
    for (std::size_t i = 0; i < out.omegas.size(); ++i) {
        out.c_values[i] = marcus_density(bath, out.omegas[i]);
    }
    return out;
}

double spectrum_l1_distance(const CorrelationSpectrum& a, const CorrelationSpectrum& b) {
    check_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.c_values.size(); ++i) s += std::abs(a.c_values[i] - b.c_values[i]);
    return s * a.d_omega / (2.0 * kPi);
}

double kms_deviation(const CorrelationSpectrum& c, double temperature, double rel_floor) {
    if (!(temperature > 0.0)) throw DomainError("kms_deviation: temperature must be positive");
    if (c.c_values.empty()) throw DomainError("kms_deviation: spectrum is empty");
    const double floor = rel_floor * *std::max_element(c.c_values.begin(), c.c_values.end());
    double worst = 0.0;
    for (std::size_t k = 1; k <= c.half; ++k) {
        const double pos = c.c_values[c.half + k];
        const double neg = c.c_values[c.half - k];
        if (pos < floor || neg < floor) continue;
        const double ratio = neg * std::exp(c.omegas[c.half + k] / temperature) / pos;
        worst = std::max(worst, std::abs(ratio - 1.0));
    }
    return worst;
}

QuadratureValue exact_rate(const Ladder& ladder, const CorrelationSpectrum& source,
                           const CorrelationSpectrum& drain, std::size_t level, LadderSign sign,
                           std::complex<double> chi) {
    check_same_grid(source, drain);
    double g = 0.0;
    const double gap = gap_of(ladder, level, g);
    if (g == 0.0) return {{0.0, 0.0}, 0.0};

    const std::complex<double> iu{0.0, 1.0};
    const long half = static_cast<long>(source.half);
    const double dw = source.d_omega;
    const double plus = sign == LadderSign::Plus ? 1.0 : -1.0;
    std::complex<double> full{0.0, 0.0};
    std::complex<double> even{0.0, 0.0};
    for (long k = -half; k <= half; ++k) {
        const double w = static_cast<double>(k) * dw;
        // kappa+: C_S(-w) C_D(w - gap) exp(i w chi)
        // kappa-: C_S(w)  C_D(gap - w) exp(-i w chi)
        const double cs = source.c_values[static_cast<std::size_t>(half - static_cast<long>(plus) * k)];
        if (cs == 0.0) continue;
        const double cd = drain.value_at(plus * (w - gap));
        const std::complex<double> term = cs * cd * std::exp(plus * iu * w * chi);
        full += term;
        if (k % 2 == 0) even += term;
    }
    const double half_tunnel = 0.5 * ladder.tunneling;
    const std::complex<double> pre =
        half_tunnel * half_tunnel * g / (2.0 * kPi) * std::exp(-plus * iu * gap * chi);
    QuadratureValue out;
    out.value = pre * full * dw;
    out.error = std::abs(pre * (full * dw - even * (2.0 * dw)));
    return out;
}

QuadratureValue exact_rate_time_domain(const Ladder& ladder, const BathPair& baths,
                                       std::size_t level, LadderSign sign, double chi,
                                       const KernelGridSpec& spec) {
    check_grid_spec(spec);
    baths.validate();
    double g = 0.0;
    const double gap = gap_of(ladder, level, g);
    if (g == 0.0) return {{0.0, 0.0}, 0.0};

    const BathPropagator qs(baths.source, spec.quad_tolerance);
    const BathPropagator qd(baths.drain, spec.quad_tolerance);
    // Re Q_S(tau) + Re Q_D(tau - chi) passes the target once either term does.
    double t_max = spec.t_max;
    if (t_max == 0.0) {
        const auto ts = adaptive_t_max(qs, spec);
        const auto td = adaptive_t_max(qd, spec);
        if (!ts && !td) throw_outside_validity(baths.source, spec);
        t_max = std::min(ts.value_or(std::numeric_limits<double>::infinity()),
                         td.value_or(std::numeric_limits<double>::infinity())) +
                std::abs(chi);
    }
    const auto steps = static_cast<long>(std::ceil(t_max / spec.dt));
    if (static_cast<std::size_t>(2 * steps + 1) > spec.max_time_points) {
        throw_outside_validity(baths.source, spec);
    }

    const double plus = sign == LadderSign::Plus ? 1.0 : -1.0;
    const std::complex<double> iu{0.0, 1.0};
    std::complex<double> full{0.0, 0.0};
    std::complex<double> even{0.0, 0.0};
    for (long n = -steps; n <= steps; ++n) {
        const double tau = static_cast<double>(n) * spec.dt;
        const std::complex<double> term =
            std::exp(-qs(tau) - qd(tau - chi) - plus * iu * gap * tau);
        const double weight = (n == -steps || n == steps) ? 0.5 : 1.0;
        full += weight * term;
        if (n % 2 == 0) even += ((n == -steps || n == steps) ? 0.5 : 1.0) * term;
    }
    const double half_tunnel = 0.5 * ladder.tunneling;
    const double pre = half_tunnel * half_tunnel * g;
    QuadratureValue out;
    out.value = pre * full * spec.dt;
    out.error = std::abs(pre * (full * spec.dt - even * (2.0 * spec.dt)));
    return out;
}

ExactRates exact_rate_table(const Ladder& ladder, const BathPair& baths,
                            const CorrelationSpectrum& source, const CorrelationSpectrum& drain) {
    check_same_grid(source, drain);
    baths.validate();
    const std::size_t links = ladder.links();
    ExactRates out;
    out.rates.kappa_plus.resize(links);
    out.rates.kappa_minus.resize(links);
    out.err_plus.resize(links);
    out.err_minus.resize(links);
    out.moments.q_plus.resize(links);
    out.moments.q_minus.resize(links);
    out.moments.beta_bias = baths.drain.beta() - baths.source.beta();

    const double w = baths.source.temperature * baths.source.xi() +
                     baths.drain.temperature * baths.drain.xi();
    out.rates.w = w;
    const double half_tunnel = 0.5 * ladder.tunneling;
    out.rates.prefactor = w > 0.0 ? half_tunnel * half_tunnel * std::sqrt(kPi / w) : 1.0;

    // d/d(i chi) log kappa at chi = 0 from the first moment of the kernel.
    const long half = static_cast<long>(source.half);
    const double dw = source.d_omega;
    for (std::size_t l = 0; l < links; ++l) {
        const double gap = ladder.gaps[l];
        for (const LadderSign sign : {LadderSign::Plus, LadderSign::Minus}) {
            const double plus = sign == LadderSign::Plus ? 1.0 : -1.0;
            double mass = 0.0;
            double first = 0.0;
            for (long k = -half; k <= half; ++k) {
                const double wk = static_cast<double>(k) * dw;
                const double cs = source.c_values[static_cast<std::size_t>(half - static_cast<long>(plus) * k)];
                if (cs == 0.0) continue;
                const double c = cs * drain.value_at(plus * (wk - gap));
                mass += c;
                first += wk * c;
            }
            const QuadratureValue r = exact_rate(ladder, source, drain, l, sign);
            const double mean = mass != 0.0 ? first / mass : 0.0;
            if (sign == LadderSign::Plus) {
                // Quadrature noise can leave a tiny negative value for a vanishing rate.
                out.rates.kappa_plus[l] = std::max(r.value.real(), 0.0);
                out.err_plus[l] = r.error;
                out.moments.q_plus[l] = -gap + mean;
            } else {
                out.rates.kappa_minus[l] = std::max(r.value.real(), 0.0);
                out.err_minus[l] = r.error;
                out.moments.q_minus[l] = gap - mean;
            }
        }
    }
    return out;
}

}  // namespace cqt
