// io.hpp: CSV and JSON emission and CSV read-back.
//
// Numbers are written with 17 significant digits so every value reloads
// bit-identically. Schemas (header row first):
//   steady     m,P
//   cumulants  J,S,FF,err_J,err_S
//   sweep      N,alpha,J,S,FF,err_J,err_S
//   propagator t,re_Q,im_Q
//   spectrum   omega,C,C_marcus

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqt/analysis.hpp"
#include "cqt/fcs.hpp"
#include "cqt/kernel.hpp"
#include "cqt/liouvillian.hpp"
#include "cqt/model.hpp"

namespace cqt {

std::string format_number(double v);

struct PopulationRow {
    double m;
    double p;
};

void write_steady_csv(std::ostream& out, const Ladder& ladder, const SteadyState& ss);
void write_cumulants_csv(std::ostream& out, const CumulantSet& c);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_propagator_csv(std::ostream& out, const PropagatorGrid& grid);
void write_spectrum_csv(std::ostream& out, const CorrelationSpectrum& exact,
                        const CorrelationSpectrum& marcus);

std::vector<PopulationRow> read_steady_csv(std::istream& in);
CumulantSet read_cumulants_csv(std::istream& in);
// Rows come back with ok = true and flux_direct unset (NaN).
SweepResult read_sweep_csv(std::istream& in);

nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(const LinearFit& fit);
// Fields: objective, gamma, gamma_stderr, prefactor, r_squared, linear{slope,
// intercept, r_squared, slope_stderr}, per_n[{N, alpha_opt, value_opt,
// alpha_lo, alpha_hi}], gamma_with_n1, gamma_drop_smallest (null if absent).
nlohmann::json to_json(const ScalingReport& report);

}  // namespace cqt
