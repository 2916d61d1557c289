#include "cqt/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "cqt/errors.hpp"
#include "cqt/liouvillian.hpp"
#include "cqt/rates.hpp"

namespace cqt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count) on a small pool; the first failure by index
// is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::exception_ptr> failures(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

int order_for(Objective objective) { return objective == Objective::C3 ? 3 : 2; }

std::optional<double> evaluate_objective(const ModelParams& params, Objective objective,
                                         const FdOptions& fd) {
    try {
        if (objective == Objective::Flux) return flux_direct(params);
        const CumulantSet c = cumulants_fd(params, order_for(objective), fd);
        const double v = objective == Objective::Noise ? c.noise : c.c3.value_or(kNaN);
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

}  // namespace

std::string to_string(Objective objective) {
    switch (objective) {
        case Objective::Flux:
            return "flux";
        case Objective::Noise:
            return "noise";
        default:
            return "c3";
    }
}

Objective objective_from_string(const std::string& name) {
    if (name == "flux") return Objective::Flux;
    if (name == "noise") return Objective::Noise;
    if (name == "c3") return Objective::C3;
    throw DomainError("unknown objective '" + name + "' (expected flux, noise or c3)");
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log_grid: need 0 < lo < hi");
    if (n < 2) throw DomainError("log_grid: need at least 2 points");
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

ModelParams with_coupling(const ModelParams& base, int n_qubits, double alpha) {
    ModelParams p = base;
    p.system.n_qubits = n_qubits;
    p.baths.source.alpha = alpha;
    p.baths.drain.alpha = alpha;
    p.validate();
    return p;
}

void SweepSpec::validate() const {
    if (alphas.empty()) throw DomainError("sweep: alpha grid is empty");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw DomainError("sweep: alpha values must be positive");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) {
            throw DomainError("sweep: alpha grid must be strictly increasing");
        }
    }
    if (sizes.empty()) throw DomainError("sweep: size list is empty");
    std::set<int> seen;
    for (int n : sizes) {
        if (n < 1) throw DomainError("sweep: sizes must be positive");
        if (!seen.insert(n).second) throw DomainError("sweep: sizes must be distinct");
    }
    if (!(cross_check_tolerance > 0.0)) throw DomainError("sweep: cross-check tolerance must be positive");
    base.validate();
}

std::size_t SweepResult::flagged() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok; }));
}

SweepRow evaluate_point(const ModelParams& params, Objective objective, const FdOptions& fd,
                        double cross_check_tolerance) {
    SweepRow row;
    row.n_qubits = params.system.n_qubits;
    row.alpha = params.baths.source.alpha;
    try {
        const Ladder ladder = build_ladder(params);
        const RateTable rates = marcus_rates(ladder, params.baths);
        const JumpMoments moments = jump_moments(ladder, params.baths);
        row.flux_direct = flux_direct(rates, moments, steady_state(build_generator(rates)));
        row.cumulants = cumulants_fd(rates, moments, order_for(objective), fd);
        const double gap = std::abs(row.cumulants.flux - row.flux_direct);
        const double floor = fd.abs_tolerance * rates.max_rate() * std::max(moments.tilt_scale(), 1.0);
        const double allowed = std::max({cross_check_tolerance * std::abs(row.flux_direct),
                                         3.0 * row.cumulants.err_flux, floor});
        if (!(gap <= allowed)) {
            std::ostringstream msg;
            msg << "flux routes disagree: finite difference " << row.cumulants.flux << ", direct "
                << row.flux_direct;
            row.ok = false;
            row.flag = msg.str();
        }
    } catch (const std::exception& e) {
        row.ok = false;
        row.flag = e.what();
        row.flux_direct = kNaN;
        row.cumulants.flux = row.cumulants.noise = row.cumulants.ff = kNaN;
        row.cumulants.err_flux = row.cumulants.err_noise = kNaN;
    }
    return row;
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t na = spec.alphas.size();
    SweepResult out;
    out.rows.resize(spec.sizes.size() * na);
    parallel_for(out.rows.size(), spec.threads, [&](std::size_t i) {
        const int n = spec.sizes[i / na];
        const double alpha = spec.alphas[i % na];
        out.rows[i] = evaluate_point(with_coupling(spec.base, n, alpha), spec.objective, spec.fd,
                                     spec.cross_check_tolerance);
    });
    return out;
}

std::optional<double> objective_value(const SweepRow& row, Objective objective) {
    if (!row.ok) return std::nullopt;
    switch (objective) {
        case Objective::Flux:
            return row.flux_direct;
        case Objective::Noise:
            return row.cumulants.noise;
        default:
            return row.cumulants.c3;
    }
}

OptResult maximize_on_log_grid(const std::function<std::optional<double>(double)>& f,
                               std::span<const double> grid, double rel_tolerance) {
    if (grid.size() < 3) throw DomainError("optimize: grid needs at least 3 points");
    if (!(rel_tolerance > 0.0)) throw DomainError("optimize: tolerance must be positive");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw DomainError("optimize: grid must be positive and strictly increasing");
        }
    }

    OptResult out;
    out.tolerance = rel_tolerance;
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ++out.evaluations;
        if (const auto v = f(grid[i]); v && std::isfinite(*v)) {
            idx.push_back(i);
            val.push_back(*v);
        }
    }
    if (idx.size() < 3) throw NumericalError("optimize: fewer than 3 grid points could be evaluated");

    const auto best = static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin());
    if (best == 0 || best + 1 == val.size()) {
        std::ostringstream msg;
        msg << "monotone objective: no interior maximum on the grid, largest value " << val[best]
            << " at boundary alpha=" << grid[idx[best]];
        throw MonotoneObjectiveError(msg.str(), grid[idx[best]]);
    }
    int sign_changes = 0;
    int last_sign = 0;
    for (std::size_t k = 1; k < val.size(); ++k) {
        const double d = val[k] - val[k - 1];
        const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sg == 0) continue;
        if (last_sign != 0 && sg != last_sign) ++sign_changes;
        last_sign = sg;
    }
    if (sign_changes != 1) {
        std::ostringstream msg;
        msg << "optimize: objective is not unimodal on the grid (" << sign_changes
            << " slope sign changes)";
        throw NumericalError(msg.str());
    }

    out.alpha_lo = grid[idx[best - 1]];
    out.alpha_hi = grid[idx[best + 1]];
    double best_x = std::log(grid[idx[best]]);
    double best_v = val[best];
    const auto g = [&](double u) {
        ++out.evaluations;
        const auto v = f(std::exp(u));
        const double r = v && std::isfinite(*v) ? *v : -std::numeric_limits<double>::infinity();
        if (r > best_v) {
            best_v = r;
            best_x = u;
        }
        return r;
    };

    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    const double tol = std::log1p(rel_tolerance);
    double a = std::log(out.alpha_lo);
    double b = std::log(out.alpha_hi);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = g(c);
    double fd = g(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = g(d);
        }
    }
    out.alpha_opt = std::exp(best_x);
    out.value_opt = best_v;
    return out;
}

OptResult optimize_alpha(const ModelParams& base, int n_qubits, Objective objective,
                         const OptOptions& options) {
    return maximize_on_log_grid(
        [&](double alpha) {
            return evaluate_objective(with_coupling(base, n_qubits, alpha), objective, options.fd);
        },
        options.grid, options.rel_tolerance);
}

LinearFit fit_linear(std::span<const FitPoint> points) {
    const std::size_t n = points.size();
    if (n < 3) throw DomainError("fit: need at least 3 points");
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("fit: non-finite point");
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit: abscissae are all equal");
    LinearFit out;
    out.points = n;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (const auto& p : points) {
        const double r = p.y - (out.intercept + out.slope * p.x);
        ss_res += r * r;
    }
    out.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    out.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    return out;
}

PowerLawFit fit_power_law(std::span<const FitPoint> points) {
    std::vector<FitPoint> logs;
    logs.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0)) throw DomainError("power-law fit: data must be positive");
        logs.push_back({std::log(p.x), std::log(p.y)});
    }
    const LinearFit lin = fit_linear(logs);
    PowerLawFit out;
    out.gamma = -lin.slope;
    out.prefactor = std::exp(lin.intercept);
    out.r_squared = lin.r_squared;
    out.gamma_stderr = lin.slope_stderr;
    out.points = lin.points;
    return out;
}

ScalingReport scaling_analysis(const ModelParams& base, std::span<const int> sizes,
                               Objective objective, const OptOptions& options, unsigned threads) {
    std::vector<int> ns(sizes.begin(), sizes.end());
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
        throw DomainError("scaling: sizes must be distinct");
    }
    if (!ns.empty() && ns.front() < 1) throw DomainError("scaling: sizes must be positive");
    if (std::count_if(ns.begin(), ns.end(), [](int n) { return n >= 2; }) < 3) {
        throw DomainError("scaling: need at least 3 sizes with N >= 2");
    }

    ScalingReport out;
    out.objective = objective;
    out.points.resize(ns.size());
    parallel_for(ns.size(), threads, [&](std::size_t i) {
        out.points[i] = {ns[i], optimize_alpha(base, ns[i], objective, options)};
    });

    std::vector<FitPoint> alpha_pts;
    std::vector<FitPoint> value_pts;
    std::vector<FitPoint> alpha_all;
    for (const auto& p : out.points) {
        alpha_all.push_back({static_cast<double>(p.n_qubits), p.opt.alpha_opt});
        if (p.n_qubits < 2) continue;
        alpha_pts.push_back(alpha_all.back());
        value_pts.push_back({static_cast<double>(p.n_qubits), p.opt.value_opt});
    }
    out.alpha_fit = fit_power_law(alpha_pts);
    out.value_fit = fit_linear(value_pts);
    if (alpha_all.size() > alpha_pts.size()) out.alpha_fit_with_n1 = fit_power_law(alpha_all);
    if (alpha_pts.size() >= 4) {
        out.alpha_fit_drop_smallest =
            fit_power_law(std::span<const FitPoint>(alpha_pts).subspan(1));
    }
    return out;
}

}  // namespace cqt
