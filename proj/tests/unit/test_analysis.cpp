#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "cqt/analysis.hpp"
#include "cqt/errors.hpp"

using namespace cqt;

namespace {

const ModelParams kFig3 = symmetric_model(1, 0.0, 0.1, 10.0, 4.0, 2.0);

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0 || (std::isnan(a) && std::isnan(b)); }

}  // namespace

TEST_CASE("log grid endpoints and spacing") {
    const auto g = log_grid(1e-3, 10.0, 60);
    REQUIRE(g.size() == 60);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 10.0);
    for (std::size_t i = 2; i < g.size(); ++i) {
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS(log_grid(1.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS(log_grid(1.0, 2.0, 1), DomainError);
}

TEST_CASE("power-law and linear fits on exact data") {
    const std::vector<FitPoint> pl{{2, 0.25}, {4, 0.0625}, {8, 0.015625}};
    const PowerLawFit f = fit_power_law(pl);
    CHECK(f.gamma == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.prefactor == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(f.points == 3);

    const std::vector<FitPoint> line{{1, 4}, {2, 7}, {3, 10}, {5, 16}};
    const LinearFit l = fit_linear(line);
    CHECK(l.slope == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(l.intercept == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(l.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(l.slope_stderr <= 1e-12);

    const std::vector<FitPoint> two{{1, 1}, {2, 2}};
    CHECK_THROWS_AS(fit_linear(two), DomainError);
    const std::vector<FitPoint> flat{{2, 1}, {2, 2}, {2, 3}};
    CHECK_THROWS_AS(fit_linear(flat), DomainError);
    const std::vector<FitPoint> negative{{1, 1}, {2, -1}, {3, 1}};
    CHECK_THROWS_AS(fit_power_law(negative), DomainError);
}

TEST_CASE("power-law fit tolerates multiplicative noise") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::vector<FitPoint> pts;
    for (int n : {2, 4, 6, 8, 10, 12}) pts.push_back({double(n), 0.8 * std::pow(n, -2.0) * (1.0 + noise(rng))});
    const PowerLawFit f = fit_power_law(pts);
    CHECK(f.gamma >= 1.9);
    CHECK(f.gamma <= 2.1);
    CHECK(f.r_squared > 0.99);
    CHECK(f.r_squared <= 1.0);
    CHECK(f.gamma_stderr > 0.0);
}

TEST_CASE("golden-section maximum of a synthetic objective") {
    for (double a0 : {0.003, 0.05, 0.7, 2.0}) {
        const auto f = [a0](double a) -> std::optional<double> { return a * std::exp(-a / a0); };
        const OptResult r = maximize_on_log_grid(f, log_grid(1e-4, 100.0, 40));
        CAPTURE(a0);
        CHECK(std::abs(r.alpha_opt / a0 - 1.0) <= 1e-4);
        CHECK(r.alpha_lo < r.alpha_opt);
        CHECK(r.alpha_opt < r.alpha_hi);
        CHECK(r.value_opt >= *f(r.alpha_lo));
        CHECK(r.value_opt >= *f(r.alpha_hi));
        CHECK(r.tolerance == 1e-4);
    }
}

TEST_CASE("optimizer rejects monotone and multimodal objectives") {
    const auto grid = log_grid(1e-3, 10.0, 30);
    try {
        (void)maximize_on_log_grid([](double a) -> std::optional<double> { return a; }, grid);
        FAIL("monotone objective accepted");
    } catch (const MonotoneObjectiveError& e) {
        CHECK(e.argmax() == 10.0);
        CHECK(std::string(e.what()).find("monotone objective") != std::string::npos);
    }
    const auto two_peaks = [](double a) -> std::optional<double> {
        const double x = std::log10(a);
        return std::exp(-(x + 2) * (x + 2) * 4) + std::exp(-(x - 0.5) * (x - 0.5) * 4);
    };
    CHECK_THROWS_AS(maximize_on_log_grid(two_peaks, grid), NumericalError);
    // Unevaluable points are skipped, not treated as extrema.
    const auto holes = [](double a) -> std::optional<double> {
        if (a > 1.0 && a < 2.0) return std::nullopt;
        return a * std::exp(-a / 0.1);
    };
    CHECK(maximize_on_log_grid(holes, grid).alpha_opt == doctest::Approx(0.1).epsilon(1e-4));
}

TEST_CASE("degenerate sweep matches a direct evaluation bit for bit") {
    SweepSpec spec;
    spec.base = kFig3;
    spec.alphas = {0.2};
    spec.sizes = {4};
    const SweepResult r = sweep(spec);
    REQUIRE(r.rows.size() == 1);
    const SweepRow direct = evaluate_point(with_coupling(kFig3, 4, 0.2), Objective::Flux);
    const CumulantSet fd = cumulants_fd(with_coupling(kFig3, 4, 0.2));
    CHECK(r.rows[0].ok);
    CHECK(same_bits(r.rows[0].cumulants.flux, fd.flux));
    CHECK(same_bits(r.rows[0].cumulants.noise, fd.noise));
    CHECK(same_bits(r.rows[0].flux_direct, direct.flux_direct));
    CHECK(same_bits(r.rows[0].flux_direct, flux_direct(with_coupling(kFig3, 4, 0.2))));
}

TEST_CASE("sweep is ordered, complete and independent of thread count") {
    SweepSpec spec;
    spec.base = kFig3;
    spec.alphas = log_grid(1e-3, 10.0, 25);
    spec.sizes = {6, 2, 4};
    spec.threads = 1;
    const SweepResult serial = sweep(spec);
    spec.threads = 5;
    const SweepResult parallel = sweep(spec);
    REQUIRE(serial.rows.size() == 75);
    CHECK(serial.flagged() == 0);
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].n_qubits == spec.sizes[i / 25]);
        CHECK(serial.rows[i].alpha == spec.alphas[i % 25]);
        CHECK(same_bits(serial.rows[i].cumulants.flux, parallel.rows[i].cumulants.flux));
        CHECK(same_bits(serial.rows[i].cumulants.noise, parallel.rows[i].cumulants.noise));
        CHECK(std::isfinite(serial.rows[i].cumulants.noise));
    }
    spec.sizes = {2, 2};
    CHECK_THROWS_AS(sweep(spec), DomainError);
    spec.sizes = {2};
    spec.alphas = {0.1, 0.05};
    CHECK_THROWS_AS(sweep(spec), DomainError);
}

TEST_CASE("flux has an interior maximum that moves to weaker coupling with N") {
    double prev = 1e9;
    for (int n : {2, 4, 6}) {
        const OptResult r = optimize_alpha(kFig3, n, Objective::Flux);
        CAPTURE(n);
        CHECK(r.alpha_opt < prev);
        CHECK(r.alpha_lo < r.alpha_opt);
        CHECK(r.alpha_opt < r.alpha_hi);
        prev = r.alpha_opt;
    }
}

TEST_CASE("optimal coupling is stable under grid refinement") {
    OptOptions coarse;
    OptOptions fine;
    fine.grid = log_grid(1e-3, 10.0, 119);
    const double a = optimize_alpha(kFig3, 6, Objective::Flux, coarse).alpha_opt;
    const double b = optimize_alpha(kFig3, 6, Objective::Flux, fine).alpha_opt;
    CHECK(std::abs(a - b) <= 1e-3 * b);
}

TEST_CASE("scaling report variants") {
    const std::vector<int> sizes{1, 2, 4, 6, 8};
    const ScalingReport r = scaling_analysis(kFig3, sizes, Objective::Flux);
    REQUIRE(r.points.size() == 5);
    CHECK(r.points.front().n_qubits == 1);
    CHECK(r.alpha_fit.points == 4);
    CHECK(r.value_fit.points == 4);
    REQUIRE(r.alpha_fit_with_n1.has_value());
    CHECK(r.alpha_fit_with_n1->points == 5);
    REQUIRE(r.alpha_fit_drop_smallest.has_value());
    CHECK(r.alpha_fit_drop_smallest->points == 3);
    CHECK(r.alpha_fit.gamma > 1.0);
    CHECK(r.value_fit.slope > 0.0);
    const std::vector<int> too_few{1, 2, 4};
    CHECK_THROWS_AS(scaling_analysis(kFig3, too_few, Objective::Flux), DomainError);
}

TEST_CASE("objective names round-trip") {
    for (Objective o : {Objective::Flux, Objective::Noise, Objective::C3}) {
        CHECK(objective_from_string(to_string(o)) == o);
    }
    CHECK_THROWS_AS(objective_from_string("skewness"), DomainError);
}

TEST_CASE("unresolvable points are flagged, not reported as zero") {
    const SweepRow row = evaluate_point(with_coupling(kFig3, 10, 8.5547), Objective::Noise);
    CHECK_FALSE(row.ok);
    CHECK(std::isnan(row.cumulants.noise));
    CHECK(row.flag.find("resolution") != std::string::npos);
}
