#include "cqt/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

void check_rates(const RateTable& rates) {
    if (rates.kappa_plus.empty() || rates.kappa_plus.size() != rates.kappa_minus.size()) {
        throw DomainError("build_generator: kappa+ and kappa- tables differ in length");
    }
    if (!(rates.prefactor > 0.0)) {
        throw DomainError("build_generator: rate prefactor must be positive");
    }
}

TiltedGenerator untilted(const RateTable& rates) {
    check_rates(rates);
    const std::size_t links = rates.links();
    TiltedGenerator gen;
    gen.dim = links + 1;
    gen.scale = rates.prefactor;
    gen.diag.assign(gen.dim, 0.0);
    gen.lower.resize(links);
    gen.upper.resize(links);
    gen.base_lower.resize(links);
    gen.base_upper.resize(links);
    gen.lower_excess.assign(links, 0.0);
    gen.upper_excess.assign(links, 0.0);
    const double inv = 1.0 / rates.prefactor;
    for (std::size_t k = 0; k < links; ++k) {
        gen.lower[k] = rates.kappa_plus[k] * inv;
        gen.upper[k] = rates.kappa_minus[k] * inv;
        gen.diag[k] -= gen.lower[k];
        gen.diag[k + 1] -= gen.upper[k];
    }
    gen.base_lower = gen.lower;
    gen.base_upper = gen.upper;
    return gen;
}

double link_m(std::size_t dim, std::size_t link) {
    return -0.5 * static_cast<double>(dim - 1) + static_cast<double>(link);
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double eigen_residual(const TiltedGenerator& gen, double value, std::span<const double> v) {
    double res = 0.0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < gen.dim; ++i) {
        double wv = gen.diag[i] * v[i];
        if (i > 0) wv += gen.lower[i - 1] * v[i - 1];
        if (i + 1 < gen.dim) wv += gen.upper[i] * v[i + 1];
        res = std::max(res, std::abs(wv - value * v[i]));
        vmax = std::max(vmax, std::abs(v[i]));
    }
    return res / (gen.max_rate() * vmax);
}

// Level k decays up at b_k and down at a_k (a_0 = b_N = 0); link k carries the
// product b_k a_{k+1} (1 + eta_k) once tilted.
struct LinkTilt {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> eta;
};

LinkTilt link_tilt(const TiltedGenerator& gen) {
    const std::size_t links = gen.dim - 1;
    LinkTilt t;
    t.a.assign(gen.dim, 0.0);
    t.b.assign(gen.dim, 0.0);
    t.eta.resize(links);
    for (std::size_t k = 0; k < links; ++k) {
        const double rates[] = {gen.base_lower[k], gen.base_upper[k], gen.lower[k], gen.upper[k]};
        if (std::any_of(std::begin(rates), std::end(rates),
                        [](double r) { return !(r > 0.0) || !std::isfinite(r); })) {
            std::ostringstream msg;
            msg << "dominant_eigenvalue: tilted rate across link m = " << link_m(gen.dim, k)
                << " is zero or overflowed (tilt s = " << gen.tilt << ")";
            throw NumericalError(msg.str());
        }
        t.b[k] = gen.base_lower[k];
        t.a[k + 1] = gen.base_upper[k];
        const double ep = gen.lower_excess[k] / gen.base_lower[k];
        const double em = gen.upper_excess[k] / gen.base_upper[k];
        t.eta[k] = ep + em + ep * em;
        if (!std::isfinite(t.eta[k])) {
            std::ostringstream msg;
            msg << "dominant_eigenvalue: tilt overflowed across link m = " << link_m(gen.dim, k)
                << " (tilt s = " << gen.tilt << ")";
            throw NumericalError(msg.str());
        }
    }
    return t;
}

// Pivots d_k = b_k + r_k of (lambda - W) with r_0 = lambda and
// r_k = lambda + a_k (r_{k-1} - b_{k-1} eta_{k-1}) / d_{k-1}.
// All pivots are positive exactly when lambda exceeds the Perron root.
bool above_root(const LinkTilt& t, double lambda) {
    double r = lambda;
    double d = t.b[0] + r;
    if (!(d > 0.0)) return false;
    for (std::size_t k = 1; k < t.a.size(); ++k) {
        r = lambda + t.a[k] * (r - t.b[k - 1] * t.eta[k - 1]) / d;
        d = t.b[k] + r;
        if (!(d > 0.0)) return false;
    }
    return true;
}

// The same ladder read from the top level down.
LinkTilt reversed(const LinkTilt& t) {
    LinkTilt r;
    r.a.assign(t.b.rbegin(), t.b.rend());
    r.b.assign(t.a.rbegin(), t.a.rend());
    r.eta.assign(t.eta.rbegin(), t.eta.rend());
    return r;
}

std::vector<double> pivot_offsets(const LinkTilt& t, double lambda) {
    std::vector<double> r(t.a.size());
    r[0] = lambda;
    for (std::size_t k = 1; k < r.size(); ++k) {
        r[k] = lambda + t.a[k] * (r[k - 1] - t.b[k - 1] * t.eta[k - 1]) / (t.b[k - 1] + r[k - 1]);
    }
    return r;
}

// Twisted factorization at lambda just above the root: top-down pivots fix
// the ratios above the twist index, bottom-up pivots those below, and the
// twist sits where the leftover row residual r_k + r'_k - lambda is smallest.
// Every ratio is a quotient of positive numbers. Accumulated in logs so wide
// population ranges neither overflow nor vanish.
std::vector<double> twisted_vector(const TiltedGenerator& gen, const LinkTilt& t, double lambda) {
    const std::size_t n = gen.dim;
    const std::vector<double> down = pivot_offsets(t, lambda);
    std::vector<double> up = pivot_offsets(reversed(t), lambda);
    std::reverse(up.begin(), up.end());
    std::size_t twist = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double gamma = std::abs(down[k] + up[k] - lambda);
        if (gamma < best) {
            best = gamma;
            twist = k;
        }
    }
    std::vector<double> lv(n, 0.0);
    for (std::size_t k = twist; k-- > 0;) {
        lv[k] = lv[k + 1] + std::log(gen.upper[k]) - std::log(t.b[k] + down[k]);
    }
    for (std::size_t k = twist + 1; k < n; ++k) {
        lv[k] = lv[k - 1] + std::log(gen.lower[k - 1]) - std::log(t.a[k] + up[k]);
    }
    const double top = *std::max_element(lv.begin(), lv.end());
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::exp(lv[k] - top);
    const double total = sum(v);
    for (double& e : v) e /= total;
    return v;
}

}  // namespace

double TiltedGenerator::max_rate() const {
    double r = 0.0;
    for (double d : diag) r = std::max(r, std::abs(d));
    for (double l : lower) r = std::max(r, l);
    for (double u : upper) r = std::max(r, u);
    return r;
}

Eigen::MatrixXd TiltedGenerator::dense() const {
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) w(i, i) = diag[i];
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        w(k + 1, k) = lower[k];
        w(k, k + 1) = upper[k];
    }
    return w;
}

std::vector<double> TiltedGenerator::column_sums() const {
    std::vector<double> out(diag);
    for (std::size_t k = 0; k + 1 < dim; ++k) {
        out[k] += base_lower[k];
        out[k + 1] += base_upper[k];
    }
    return out;
}

TiltedGenerator build_generator(const RateTable& rates) { return untilted(rates); }

TiltedGenerator build_generator(const RateTable& rates, const RealTiltedRates& tilted) {
    TiltedGenerator gen = untilted(rates);
    const std::size_t links = rates.links();
    if (tilted.kappa_plus.size() != links || tilted.kappa_minus.size() != links ||
        tilted.excess_plus.size() != links || tilted.excess_minus.size() != links) {
        throw DomainError("build_generator: tilted table length does not match the rate table");
    }
    const double inv = 1.0 / rates.prefactor;
    for (std::size_t k = 0; k < links; ++k) {
        gen.lower[k] = tilted.kappa_plus[k] * inv;
        gen.upper[k] = tilted.kappa_minus[k] * inv;
        gen.lower_excess[k] = tilted.excess_plus[k] * inv;
        gen.upper_excess[k] = tilted.excess_minus[k] * inv;
    }
    gen.tilt = tilted.s;
    return gen;
}

TiltedGenerator build_generator(const RateTable& rates, const JumpMoments& moments, double s) {
    return build_generator(rates, tilted_rates_real(rates, moments, s));
}

TiltedGenerator build_generator(const RateTable& rates, const TiltedRateTable& tilted) {
    const std::size_t links = rates.links();
    if (tilted.kappa_plus_chi.size() != links || tilted.kappa_minus_chi.size() != links) {
        throw DomainError("build_generator: tilted table length does not match the rate table");
    }
    if (tilted.chi.real() != 0.0) {
        throw DomainError("build_generator: only purely imaginary chi gives a real generator");
    }
    RealTiltedRates real;
    real.s = -tilted.chi.imag();
    for (std::size_t k = 0; k < links; ++k) {
        real.kappa_plus.push_back(tilted.kappa_plus_chi[k].real());
        real.kappa_minus.push_back(tilted.kappa_minus_chi[k].real());
        real.excess_plus.push_back(real.kappa_plus.back() - rates.kappa_plus[k]);
        real.excess_minus.push_back(real.kappa_minus.back() - rates.kappa_minus[k]);
    }
    return build_generator(rates, real);
}

SteadyState steady_state(const TiltedGenerator& gen) {
    if (gen.dim < 2) throw DomainError("steady_state: generator needs at least two levels");
    for (std::size_t k = 0; k + 1 < gen.dim; ++k) {
        if (!(gen.base_lower[k] > 0.0) || !(gen.base_upper[k] > 0.0)) {
            std::ostringstream msg;
            msg << "disconnected ladder: rate across link m = " << link_m(gen.dim, k)
                << " -> m+1 underflowed to zero";
            throw DisconnectedLadderError(msg.str(), link_m(gen.dim, k));
        }
    }
    const auto n = static_cast<Eigen::Index>(gen.dim);
    Eigen::MatrixXd a = gen.dense();
    // The untilted generator is wanted even if a tilt was applied.
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        a(k + 1, k) = gen.base_lower[static_cast<std::size_t>(k)];
        a(k, k + 1) = gen.base_upper[static_cast<std::size_t>(k)];
    }
    Eigen::MatrixXd system = a;
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd p = system.partialPivLu().solve(rhs);

    SteadyState ss;
    ss.populations.assign(p.data(), p.data() + n);
    const double total = sum(ss.populations);
    for (double& e : ss.populations) {
        if (!(e >= -1e-14)) {
            throw NumericalError("steady_state: negative population from the linear solve");
        }
        e = std::max(e, 0.0) / total;
    }
    const Eigen::VectorXd pn = Eigen::Map<const Eigen::VectorXd>(ss.populations.data(), n);
    ss.residual = (a * pn).cwiseAbs().maxCoeff() / gen.max_rate();
    return ss;
}

std::vector<double> geometric_population(int n_qubits, double y) {
    if (n_qubits < 1) throw DomainError("geometric_population: N must be >= 1");
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("geometric_population: ratio y must be positive and finite");
    }
    const auto levels = static_cast<std::size_t>(n_qubits) + 1;
    std::vector<double> p(levels);
    const double log_y = std::log(y);
    if (log_y == 0.0) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(levels));
        return p;
    }
    // P_k = (1 - y) y^k / (1 - y^{N+1}), k = m + j. Written for y < 1 and
    // mirrored (k -> N - k, y -> 1/y) otherwise so y^{N+1} never overflows.
    const double ly = -std::abs(log_y);
    const double norm = std::expm1(ly) / std::expm1(static_cast<double>(levels) * ly);
    for (std::size_t k = 0; k < levels; ++k) {
        const std::size_t power = log_y < 0.0 ? k : levels - 1 - k;
        p[k] = norm * std::exp(static_cast<double>(power) * ly);
    }
    return p;
}

std::vector<double> analytic_population(const SystemParams& sys, const BathPair& baths) {
    sys.validate();
    baths.validate();
    const double xi = baths.source.xi() + baths.drain.xi();
    const double w = baths.source.temperature * baths.source.xi() +
                     baths.drain.temperature * baths.drain.xi();
    if (!(w > 0.0)) throw SingularBathError("analytic_population: all couplings are zero");
    // Level-independent gap under H_s = -eps0 Jz - xi Jz^2 with xi -> 0.
    const double gap = -sys.eps0;
    // gamma+/gamma- = exp{-[(gap + xi)^2 - (gap - xi)^2] / 4W}
    const double log_y = -gap * xi / w;
    return geometric_population(sys.n_qubits, std::exp(log_y));
}

PerronResult dominant_eigenvalue(const TiltedGenerator& gen, const PerronOptions& options) {
    if (gen.dim < 2) throw DomainError("dominant_eigenvalue: generator needs at least two levels");
    const LinkTilt t = link_tilt(gen);
    PerronResult result;

    if (std::all_of(t.eta.begin(), t.eta.end(), [](double e) { return e == 0.0; })) {
        result.vector = twisted_vector(gen, t, 0.0);
        result.residual = eigen_residual(gen, 0.0, result.vector);
        return result;
    }

    // G lies between the extreme b_k eta_k and zero; the sign test at zero
    // picks the half. lo stays below the root, hi above it.
    double lo_bound = 0.0;
    double hi_bound = 0.0;
    for (std::size_t k = 0; k + 1 < gen.dim; ++k) {
        lo_bound = std::min(lo_bound, t.b[k] * t.eta[k]);
        hi_bound = std::max(hi_bound, t.b[k] * t.eta[k]);
    }
    double lo = 0.0;
    double hi = 0.0;
    if (above_root(t, 0.0)) {
        lo = 1.01 * lo_bound;
    } else {
        hi = 1.01 * hi_bound;
    }
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * gen.max_rate();
    for (int widen = 0; above_root(t, lo); ++widen) {
        if (widen > 60) throw NumericalError("dominant_eigenvalue: no lower bracket for the root");
        lo = 2.0 * lo - slack;
    }
    for (int widen = 0; !above_root(t, hi); ++widen) {
        if (widen > 60) throw NumericalError("dominant_eigenvalue: no upper bracket for the root");
        hi = 2.0 * hi + slack;
    }

    int steps = 0;
    for (; steps < options.max_iterations; ++steps) {
        double mid;
        if (lo == 0.0) {
            mid = 0.5 * hi;
        } else if (hi == 0.0) {
            mid = 0.5 * lo;
        } else if (lo > 0.0 && hi > 2.0 * lo) {
            mid = std::sqrt(lo) * std::sqrt(hi);
        } else if (hi < 0.0 && lo < 2.0 * hi) {
            mid = -std::sqrt(-lo) * std::sqrt(-hi);
        } else {
            mid = lo + 0.5 * (hi - lo);
        }
        if (!(mid > lo && mid < hi)) break;
        (above_root(t, mid) ? hi : lo) = mid;
    }
    result.iterations = steps;
    result.value = lo + 0.5 * (hi - lo);
    result.vector = twisted_vector(gen, t, hi);
    result.residual = eigen_residual(gen, result.value, result.vector);
    if (!(result.residual <= options.residual_tolerance)) {
        std::ostringstream msg;
        msg << "dominant_eigenvalue: residual " << result.residual << " above tolerance "
            << options.residual_tolerance << " after " << steps
            << " bisection steps (tilt s = " << gen.tilt << ", G = " << result.value << ")";
        throw NumericalError(msg.str());
    }
    return result;
}

std::vector<double> propagate_to_stationarity(const TiltedGenerator& gen, double t_final) {
    const auto n = static_cast<Eigen::Index>(gen.dim);
    const Eigen::MatrixXd w = gen.dense();
    const double norm = w.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double dt = t_final;
    while (norm * dt > 0.25) {
        dt *= 0.5;
        ++squarings;
    }
    // Degree-8 Taylor step, then square.
    const Eigen::MatrixXd x = w * dt;
    Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 8; ++k) {
        term = term * x / static_cast<double>(k);
        step += term;
    }
    for (int k = 0; k < squarings; ++k) step = step * step;
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    p = step * p;
    p /= p.sum();
    return {p.data(), p.data() + n};
}

}  // namespace cqt
