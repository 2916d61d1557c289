#include "cqt/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>

#include "cqt/analysis.hpp"
#include "cqt/config.hpp"
#include "cqt/errors.hpp"
#include "cqt/io.hpp"
#include "cqt/kernel.hpp"
#include "cqt/liouvillian.hpp"

namespace cqt {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string propagator_csv;
    std::string spectrum_csv;
};

void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    write(file);
    if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

void write_csv_file(const std::string& path, const std::function<void(std::ostream&)>& write) {
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    write(file);
}

std::string output_path(const Options& opt, const RunConfig& cfg) {
    return opt.out.empty() ? cfg.out_path : opt.out;
}

void cmd_steady(const Options& opt, std::ostream& out) {
    const RunConfig cfg = load_config(opt.config);
    const ModelParams p = cfg.model();
    const Ladder ladder = build_ladder(p);
    const SteadyState ss = steady_state(build_generator(marcus_rates(ladder, p.baths)));
    emit(output_path(opt, cfg), out, [&](std::ostream& o) { write_steady_csv(o, ladder, ss); });
}

void cmd_cumulants(const Options& opt, std::ostream& out) {
    const RunConfig cfg = load_config(opt.config);
    const CumulantSet c = cumulants_fd(cfg.model(), 2, cfg.fd_options());
    emit(output_path(opt, cfg), out, [&](std::ostream& o) { write_cumulants_csv(o, c); });
}

void cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_config(opt.config);
    const SweepResult result = sweep(cfg.sweep_spec());
    for (const SweepRow& r : result.rows) {
        if (!r.ok) err << "warning: N=" << r.n_qubits << " alpha=" << r.alpha << ": " << r.flag << '\n';
    }
    emit(output_path(opt, cfg), out, [&](std::ostream& o) { write_sweep_csv(o, result); });
}

void cmd_scaling(const Options& opt, std::ostream& out) {
    const RunConfig cfg = load_config(opt.config);
    const OptOptions options = cfg.opt_options();
    const ScalingReport report =
        scaling_analysis(cfg.sweep_template(), cfg.n_list, cfg.objective, options, cfg.threads);
    emit(output_path(opt, cfg), out, [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
}

void cmd_validate_kernel(const Options& opt, std::ostream& out) {
    const RunConfig cfg = load_config(opt.config);
    const ModelParams p = [&] {
        RunConfig c = cfg;
        if (!c.n_qubits) c.n_qubits = 1;
        return c.model();
    }();
    const KernelGridSpec spec = cfg.kernel_spec();
    nlohmann::json report = nlohmann::json::array();
    for (const BathParams& b : p.baths.as_list()) {
        const PropagatorGrid grid = propagator(b, spec);
        const CorrelationSpectrum exact = spectrum(grid, spec);
        const CorrelationSpectrum marcus = marcus_spectrum_like(b, exact);
        report.push_back({{"bath", to_string(b.label)},
                          {"alpha", b.alpha},
                          {"temperature", b.temperature},
                          {"t_max", grid.t_max},
                          {"propagator_error", grid.max_error},
                          {"truncation", exact.truncation},
                          {"d_omega", exact.d_omega},
                          {"sum_rule", exact.sum_rule()},
                          {"kms_deviation", kms_deviation(exact, b.temperature)},
                          {"l1_to_marcus", spectrum_l1_distance(exact, marcus)}});
        if (b.label == BathLabel::Source) {
            if (!opt.propagator_csv.empty()) {
                write_csv_file(opt.propagator_csv, [&](std::ostream& o) { write_propagator_csv(o, grid); });
            }
            if (!opt.spectrum_csv.empty()) {
                write_csv_file(opt.spectrum_csv,
                               [&](std::ostream& o) { write_spectrum_csv(o, exact, marcus); });
            }
        }
    }
    emit(output_path(opt, cfg), out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy transport through collective qubits between two photon baths"};
    app.require_subcommand(1);
    Options opt;

    const auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", opt.config, "key = value run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("-o,--out", opt.out, "output file (default: out_path, else standard output)");
        return sub;
    };
    CLI::App* steady = add("steady", "steady-state populations (CSV m,P)");
    CLI::App* cumulants = add("cumulants", "flux, noise and Fano factor (CSV J,S,FF,err_J,err_S)");
    CLI::App* sweep_cmd = add("sweep", "coupling sweep over N_list (CSV N,alpha,J,S,FF,err_J,err_S)");
    CLI::App* scaling = add("scaling", "optimal coupling per N and power-law fit (JSON)");
    CLI::App* kernel = add("validate-kernel", "exact bath spectra against the Gaussian form (JSON)");
    kernel->add_option("--propagator-csv", opt.propagator_csv, "write the source-bath Q(t) grid");
    kernel->add_option("--spectrum-csv", opt.spectrum_csv, "write the source-bath spectrum");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (steady->parsed()) cmd_steady(opt, out);
        if (cumulants->parsed()) cmd_cumulants(opt, out);
        if (sweep_cmd->parsed()) cmd_sweep(opt, out, err);
        if (scaling->parsed()) cmd_scaling(opt, out);
        if (kernel->parsed()) cmd_validate_kernel(opt, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace cqt
