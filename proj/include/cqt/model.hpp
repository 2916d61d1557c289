// model.hpp: physical parameters and the polaron-dressed collective spin ladder.
//
// Units: hbar = k_B = 1, energies in units of the tunneling strength Delta.
// Half-integer magnetic numbers are carried as integers 2m throughout.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cqt {

enum class BathLabel { Source, Drain };

std::string to_string(BathLabel label);

struct SystemParams {
    int n_qubits{1};
    double eps0{0.0};       // Zeeman splitting
    double tunneling{1.0};  // Delta, the energy unit

    void validate() const;
};

struct BathParams {
    BathLabel label{BathLabel::Source};
    double alpha{0.0};     // dimensionless Ohmic coupling
    double omega_c{10.0};  // cutoff frequency
    double temperature{1.0};

    double beta() const { return 1.0 / temperature; }
    // Reorganization energy of this bath, alpha * omega_c / pi.
    double xi() const;

    void validate() const;
};

// Exactly two baths. Functions needing only the xi sum take a span instead.
struct BathPair {
    BathParams source;
    BathParams drain;

    std::array<BathParams, 2> as_list() const { return {source, drain}; }
    void validate() const;
};

struct ModelParams {
    SystemParams system;
    BathPair baths;

    void validate() const;
};

// Symmetric-bath template used throughout the figures: alpha_S = alpha_D and a
// common cutoff.
ModelParams symmetric_model(int n_qubits, double eps0, double alpha, double omega_c,
                            double t_source, double t_drain);

struct Ladder {
    int two_j{1};
    std::vector<int> two_m;         // -2j, -2j+2, ..., 2j (N+1 entries)
    std::vector<double> energies;   // E_m = -eps0 m - xi m^2
    std::vector<double> gaps;       // E_{m+1} - E_m, m = -j..j-1 (N entries)
    std::vector<double> g_plus;     // per level, g+_j = 0
    std::vector<double> g_minus;    // per level, g-_{-j} = 0
    double xi_total{0.0};
    double tunneling{1.0};

    double j() const { return 0.5 * two_j; }
    double m(std::size_t level) const { return 0.5 * two_m.at(level); }
    std::size_t levels() const { return two_m.size(); }
    std::size_t links() const { return gaps.size(); }
};

double reorganization_energy(std::span<const BathParams> baths);

Ladder build_ladder(const SystemParams& sys, std::span<const BathParams> baths);
Ladder build_ladder(const ModelParams& params);

enum class LadderSign { Plus, Minus };

// g^{+-}_m = j(j+1) - m(m +- 1), evaluated exactly from 2j and 2m.
double ladder_coefficient(int two_j, int two_m, LadderSign sign);

}  // namespace cqt
