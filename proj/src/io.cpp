#include "cqt/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

void write_row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

// Splits the body of a CSV with a fixed header into rows of doubles.
std::vector<std::vector<double>> read_table(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw DomainError("CSV: expected header '" + header + "', got '" + line + "'");
    }
    std::size_t columns = 1;
    for (char c : header) columns += c == ',' ? 1 : 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0') throw DomainError("CSV: bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != columns) throw DomainError("CSV: wrong column count in '" + line + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_steady_csv(std::ostream& out, const Ladder& ladder, const SteadyState& ss) {
    if (ss.populations.size() != ladder.levels()) {
        throw DomainError("steady CSV: population count does not match the ladder");
    }
    out << "m,P\n";
    for (std::size_t k = 0; k < ladder.levels(); ++k) write_row(out, {ladder.m(k), ss.populations[k]});
}

void write_cumulants_csv(std::ostream& out, const CumulantSet& c) {
    out << "J,S,FF,err_J,err_S\n";
    write_row(out, {c.flux, c.noise, c.ff, c.err_flux, c.err_noise});
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "N,alpha,J,S,FF,err_J,err_S\n";
    for (const SweepRow& r : result.rows) {
        const CumulantSet& c = r.cumulants;
        write_row(out, {static_cast<double>(r.n_qubits), r.alpha, c.flux, c.noise, c.ff, c.err_flux,
                        c.err_noise});
    }
}

void write_propagator_csv(std::ostream& out, const PropagatorGrid& grid) {
    out << "t,re_Q,im_Q\n";
    for (std::size_t k = 0; k < grid.times.size(); ++k) {
        write_row(out, {grid.times[k], grid.q_values[k].real(), grid.q_values[k].imag()});
    }
}

void write_spectrum_csv(std::ostream& out, const CorrelationSpectrum& exact,
                        const CorrelationSpectrum& marcus) {
    if (exact.c_values.size() != marcus.c_values.size()) {
        throw DomainError("spectrum CSV: spectra are sampled on different grids");
    }
    out << "omega,C,C_marcus\n";
    for (std::size_t k = 0; k < exact.omegas.size(); ++k) {
        write_row(out, {exact.omegas[k], exact.c_values[k], marcus.c_values[k]});
    }
}

std::vector<PopulationRow> read_steady_csv(std::istream& in) {
    std::vector<PopulationRow> out;
    for (const auto& r : read_table(in, "m,P")) out.push_back({r[0], r[1]});
    return out;
}

CumulantSet read_cumulants_csv(std::istream& in) {
    const auto rows = read_table(in, "J,S,FF,err_J,err_S");
    if (rows.size() != 1) throw DomainError("cumulants CSV: expected exactly one row");
    CumulantSet c;
    c.flux = rows[0][0];
    c.noise = rows[0][1];
    c.ff = rows[0][2];
    c.err_flux = rows[0][3];
    c.err_noise = rows[0][4];
    return c;
}

SweepResult read_sweep_csv(std::istream& in) {
    SweepResult out;
    for (const auto& r : read_table(in, "N,alpha,J,S,FF,err_J,err_S")) {
        SweepRow row;
        row.n_qubits = static_cast<int>(r[0]);
        if (static_cast<double>(row.n_qubits) != r[0]) throw DomainError("sweep CSV: N must be an integer");
        row.alpha = r[1];
        row.cumulants.flux = r[2];
        row.cumulants.noise = r[3];
        row.cumulants.ff = r[4];
        row.cumulants.err_flux = r[5];
        row.cumulants.err_noise = r[6];
        row.flux_direct = std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(row);
    }
    return out;
}

nlohmann::json to_json(const PowerLawFit& fit) {
    return {{"gamma", fit.gamma},
            {"gamma_stderr", fit.gamma_stderr},
            {"prefactor", fit.prefactor},
            {"r_squared", fit.r_squared},
            {"points", fit.points}};
}

nlohmann::json to_json(const LinearFit& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"slope_stderr", fit.slope_stderr},
            {"points", fit.points}};
}

nlohmann::json to_json(const ScalingReport& report) {
    nlohmann::json per_n = nlohmann::json::array();
    for (const ScalingPoint& p : report.points) {
        per_n.push_back({{"N", p.n_qubits},
                         {"alpha_opt", p.opt.alpha_opt},
                         {"value_opt", p.opt.value_opt},
                         {"alpha_lo", p.opt.alpha_lo},
                         {"alpha_hi", p.opt.alpha_hi}});
    }
    nlohmann::json j = to_json(report.alpha_fit);
    j["objective"] = to_string(report.objective);
    j["linear"] = to_json(report.value_fit);
    j["per_n"] = per_n;
    j["gamma_with_n1"] = report.alpha_fit_with_n1 ? to_json(*report.alpha_fit_with_n1) : nullptr;
    j["gamma_drop_smallest"] =
        report.alpha_fit_drop_smallest ? to_json(*report.alpha_fit_drop_smallest) : nullptr;
    return j;
}

}  // namespace cqt
