// config.hpp: key = value run configuration for the command-line tool.
//
// One entry per line, '#' starts a comment. Recognized keys:
//   N, eps0, alpha | alpha_S, alpha_D, omega_c | omega_c_S, omega_c_D, T_S, T_D,
//   alpha_min, alpha_max, alpha_points, N_list, objective, threads,
//   fd_step, tolerance, kernel_dt, kernel_d_omega, out_path.
// Unknown or repeated keys are rejected.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqt/analysis.hpp"
#include "cqt/fcs.hpp"
#include "cqt/kernel.hpp"
#include "cqt/model.hpp"

namespace cqt {

struct RunConfig {
    std::optional<int> n_qubits;
    double eps0{0.0};
    std::optional<double> alpha_source;
    std::optional<double> alpha_drain;
    double omega_c_source{10.0};
    double omega_c_drain{10.0};
    std::optional<double> t_source;
    std::optional<double> t_drain;

    double alpha_min{1e-3};
    double alpha_max{10.0};
    int alpha_points{60};
    std::vector<int> n_list{2, 4, 6, 8, 10, 12};
    Objective objective{Objective::Flux};
    unsigned threads{0};

    double fd_step{0.0};
    double tolerance{1e-6};
    double kernel_dt{0.01};
    double kernel_d_omega{0.01};
    std::string out_path;

    // Fully specified model; needs N and the couplings.
    ModelParams model() const;
    // Bath temperatures and cutoffs only; N and alpha are filled in by sweeps.
    ModelParams sweep_template() const;
    BathPair baths() const;

    FdOptions fd_options() const;
    SweepSpec sweep_spec() const;
    OptOptions opt_options() const;
    KernelGridSpec kernel_spec() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace cqt
