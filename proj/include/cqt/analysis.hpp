// analysis.hpp: coupling sweeps, optimal-coupling search and finite-size fits.
//
// Sweeps vary alpha_S = alpha_D = alpha jointly over a template model. Rows
// are computed in parallel and stored in N-major, alpha-minor order, so the
// result does not depend on the thread count.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqt/fcs.hpp"
#include "cqt/model.hpp"

namespace cqt {

enum class Objective { Flux, Noise, C3 };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);

// n points log-spaced over [lo, hi], endpoints exact.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

// Template with N qubits and both couplings set to alpha.
ModelParams with_coupling(const ModelParams& base, int n_qubits, double alpha);

struct SweepSpec {
    std::vector<double> alphas{log_grid(1e-3, 10.0, 60)};
    std::vector<int> sizes{2, 4, 6, 8, 10, 12};
    ModelParams base{symmetric_model(1, 0.0, 0.1, 10.0, 4.0, 2.0)};
    Objective objective{Objective::Flux};
    FdOptions fd{};
    // Allowed relative gap between the finite-difference and direct flux.
    double cross_check_tolerance{1e-6};
    unsigned threads{0};  // 0: hardware concurrency

    void validate() const;
};

struct SweepRow {
    int n_qubits{0};
    double alpha{0.0};
    CumulantSet cumulants;
    double flux_direct{0.0};
    bool ok{true};
    std::string flag;  // reason when !ok
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t flagged() const;
};

// One sweep row; failures are recorded in the row instead of thrown.
SweepRow evaluate_point(const ModelParams& params, Objective objective, const FdOptions& fd = {},
                        double cross_check_tolerance = 1e-6);

SweepResult sweep(const SweepSpec& spec);

// Flux uses the direct route, noise and c3 the finite-difference route.
// Returns nullopt for flagged rows.
std::optional<double> objective_value(const SweepRow& row, Objective objective);

struct OptResult {
    double alpha_opt{0.0};
    double value_opt{0.0};
    double alpha_lo{0.0};
    double alpha_hi{0.0};
    double tolerance{0.0};  // relative, on alpha
    int evaluations{0};
};

struct OptOptions {
    std::vector<double> grid{log_grid(1e-3, 10.0, 60)};
    double rel_tolerance{1e-4};
    FdOptions fd{};
};

// Maximizes f over the coarse grid, then refines by golden section in log
// alpha inside the bracket of the grid argmax. f may return nullopt for points
// it cannot evaluate; those are skipped. Throws MonotoneObjectiveError when
// the maximum sits on the grid boundary and NumericalError when the discrete
// slope changes sign more than once.
OptResult maximize_on_log_grid(const std::function<std::optional<double>(double)>& f,
                               std::span<const double> grid, double rel_tolerance = 1e-4);

OptResult optimize_alpha(const ModelParams& base, int n_qubits, Objective objective,
                         const OptOptions& options = {});

struct PowerLawFit {
    double gamma{0.0};  // value ~ prefactor * N^(-gamma)
    double prefactor{0.0};
    double r_squared{0.0};
    double gamma_stderr{0.0};
    std::size_t points{0};
};

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
    double slope_stderr{0.0};
    std::size_t points{0};
};

struct FitPoint {
    double x;
    double y;
};

PowerLawFit fit_power_law(std::span<const FitPoint> points);
LinearFit fit_linear(std::span<const FitPoint> points);

struct ScalingPoint {
    int n_qubits{0};
    OptResult opt;
};

struct ScalingReport {
    Objective objective{Objective::Flux};
    std::vector<ScalingPoint> points;     // sizes in ascending order
    PowerLawFit alpha_fit;                // alpha_opt vs N over sizes >= 2
    LinearFit value_fit;                  // value_opt vs N over sizes >= 2
    std::optional<PowerLawFit> alpha_fit_with_n1;     // when N = 1 was requested
    std::optional<PowerLawFit> alpha_fit_drop_smallest;  // needs >= 4 sizes >= 2
};

// Optimizes each size (in parallel) and fits. Needs at least 3 sizes >= 2.
ScalingReport scaling_analysis(const ModelParams& base, std::span<const int> sizes,
                               Objective objective, const OptOptions& options = {},
                               unsigned threads = 0);

}  // namespace cqt
