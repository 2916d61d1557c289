#include "cqt/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cqt/errors.hpp"

namespace cqt {

std::string to_string(BathLabel label) {
    return label == BathLabel::Source ? "source" : "drain";
}

void SystemParams::validate() const {
    if (n_qubits < 1) {
        throw DomainError("N must be >= 1, got " + std::to_string(n_qubits));
    }
    if (!(tunneling > 0.0) || !std::isfinite(tunneling)) {
        throw DomainError("tunneling must be positive and finite");
    }
    if (!std::isfinite(eps0)) {
        throw DomainError("eps0 must be finite");
    }
}

double BathParams::xi() const { return alpha * omega_c / std::numbers::pi; }

void BathParams::validate() const {
    const std::string name = to_string(label);
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError(name + " bath: alpha must be >= 0");
    }
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
        throw DomainError(name + " bath: omega_c must be > 0");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError(name + " bath: temperature must be > 0");
    }
}

void BathPair::validate() const {
    if (source.label != BathLabel::Source || drain.label != BathLabel::Drain) {
        throw DomainError("bath pair must be labelled (source, drain)");
    }
    source.validate();
    drain.validate();
}

void ModelParams::validate() const {
    system.validate();
    baths.validate();
}

ModelParams symmetric_model(int n_qubits, double eps0, double alpha, double omega_c,
                            double t_source, double t_drain) {
    ModelParams p;
    p.system = SystemParams{n_qubits, eps0, 1.0};
    p.baths.source = BathParams{BathLabel::Source, alpha, omega_c, t_source};
    p.baths.drain = BathParams{BathLabel::Drain, alpha, omega_c, t_drain};
    return p;
}

double reorganization_energy(std::span<const BathParams> baths) {
    double xi = 0.0;
    for (const auto& b : baths) xi += b.xi();
    return xi;
}

double ladder_coefficient(int two_j, int two_m, LadderSign sign) {
    if (two_j < 0 || std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0) {
        throw DomainError("ladder_coefficient: m = " + std::to_string(0.5 * two_m) +
                          " is not a level of j = " + std::to_string(0.5 * two_j));
    }
    // 4 g = 2j(2j+2) - 2m(2m +- 2); always divisible by 4.
    const long long tj = two_j;
    const long long tm = two_m;
    const long long shift = sign == LadderSign::Plus ? 2 : -2;
    return static_cast<double>((tj * (tj + 2) - tm * (tm + shift)) / 4);
}

Ladder build_ladder(const SystemParams& sys, std::span<const BathParams> baths) {
    sys.validate();
    for (const auto& b : baths) b.validate();

    Ladder ladder;
    ladder.two_j = sys.n_qubits;
    ladder.xi_total = reorganization_energy(baths);
    ladder.tunneling = sys.tunneling;

    const int levels = sys.n_qubits + 1;
    ladder.two_m.reserve(levels);
    ladder.energies.reserve(levels);
    ladder.g_plus.reserve(levels);
    ladder.g_minus.reserve(levels);
    for (int k = 0; k < levels; ++k) {
        const int tm = -ladder.two_j + 2 * k;
        const double m = 0.5 * tm;
        ladder.two_m.push_back(tm);
        ladder.energies.push_back(-sys.eps0 * m - ladder.xi_total * m * m);
        ladder.g_plus.push_back(ladder_coefficient(ladder.two_j, tm, LadderSign::Plus));
        ladder.g_minus.push_back(ladder_coefficient(ladder.two_j, tm, LadderSign::Minus));
    }
    ladder.gaps.reserve(levels - 1);
    for (int k = 0; k + 1 < levels; ++k) {
        // Closed form -eps0 - (2m+1) xi; 2m+1 is an exact integer.
        const double two_m_plus_one = ladder.two_m[k] + 1;
        ladder.gaps.push_back(-sys.eps0 - two_m_plus_one * ladder.xi_total);
    }
    return ladder;
}

Ladder build_ladder(const ModelParams& params) {
    const auto list = params.baths.as_list();
    return build_ladder(params.system, list);
}

}  // namespace cqt
