#include "cqt/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cqt/errors.hpp"

namespace cqt {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* what) {
    std::ostringstream msg;
    msg << "config key '" << key << "': cannot parse '" << value << "' as " << what;
    throw ConfigError(msg.str());
}

double to_double(const std::string& key, std::string_view v) {
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v, "a number");
    return out;
}

int to_int(const std::string& key, std::string_view v) {
    int out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v, "an integer");
    return out;
}

std::vector<int> to_int_list(const std::string& key, std::string_view v) {
    std::vector<int> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const std::string_view item = trim(v.substr(0, comma));
        if (item.empty()) bad_value(key, v, "a comma-separated integer list");
        out.push_back(to_int(key, item));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) bad_value(key, v, "a comma-separated integer list");
    return out;
}

[[noreturn]] void missing(const char* key) {
    throw ConfigError(std::string("config is missing required key '") + key + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::optional<double> alpha;
    std::optional<double> omega_c;
    using Setter = std::function<void(const std::string&, std::string_view)>;
    const std::map<std::string, Setter> setters{
        {"N", [&](auto& k, auto v) { cfg.n_qubits = to_int(k, v); }},
        {"eps0", [&](auto& k, auto v) { cfg.eps0 = to_double(k, v); }},
        {"alpha", [&](auto& k, auto v) { alpha = to_double(k, v); }},
        {"alpha_S", [&](auto& k, auto v) { cfg.alpha_source = to_double(k, v); }},
        {"alpha_D", [&](auto& k, auto v) { cfg.alpha_drain = to_double(k, v); }},
        {"omega_c", [&](auto& k, auto v) { omega_c = to_double(k, v); }},
        {"omega_c_S", [&](auto& k, auto v) { cfg.omega_c_source = to_double(k, v); }},
        {"omega_c_D", [&](auto& k, auto v) { cfg.omega_c_drain = to_double(k, v); }},
        {"T_S", [&](auto& k, auto v) { cfg.t_source = to_double(k, v); }},
        {"T_D", [&](auto& k, auto v) { cfg.t_drain = to_double(k, v); }},
        {"alpha_min", [&](auto& k, auto v) { cfg.alpha_min = to_double(k, v); }},
        {"alpha_max", [&](auto& k, auto v) { cfg.alpha_max = to_double(k, v); }},
        {"alpha_points", [&](auto& k, auto v) { cfg.alpha_points = to_int(k, v); }},
        {"N_list", [&](auto& k, auto v) { cfg.n_list = to_int_list(k, v); }},
        {"objective",
         [&](auto& k, auto v) {
             try {
                 cfg.objective = objective_from_string(std::string(v));
             } catch (const DomainError&) {
                 bad_value(k, v, "flux, noise or c3");
             }
         }},
        {"threads",
         [&](auto& k, auto v) {
             const int t = to_int(k, v);
             if (t < 0) bad_value(k, v, "a non-negative integer");
             cfg.threads = static_cast<unsigned>(t);
         }},
        {"fd_step", [&](auto& k, auto v) { cfg.fd_step = to_double(k, v); }},
        {"tolerance", [&](auto& k, auto v) { cfg.tolerance = to_double(k, v); }},
        {"kernel_dt", [&](auto& k, auto v) { cfg.kernel_dt = to_double(k, v); }},
        {"kernel_d_omega", [&](auto& k, auto v) { cfg.kernel_d_omega = to_double(k, v); }},
        {"out_path", [&](auto&, auto v) { cfg.out_path = std::string(v); }},
    };

    std::map<std::string, int> seen;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
        if (!seen.emplace(key, line_no).second) {
            throw ConfigError("config key '" + key + "' is given more than once");
        }
        if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
        it->second(key, value);
    }

    if (alpha) {
        if (cfg.alpha_source || cfg.alpha_drain) {
            throw ConfigError("config key 'alpha' cannot be combined with 'alpha_S'/'alpha_D'");
        }
        cfg.alpha_source = cfg.alpha_drain = alpha;
    }
    if (omega_c) {
        if (seen.count("omega_c_S") || seen.count("omega_c_D")) {
            throw ConfigError("config key 'omega_c' cannot be combined with 'omega_c_S'/'omega_c_D'");
        }
        cfg.omega_c_source = cfg.omega_c_drain = *omega_c;
    }
    if (!cfg.t_source) missing("T_S");
    if (!cfg.t_drain) missing("T_D");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

BathPair RunConfig::baths() const {
    if (!t_source) missing("T_S");
    if (!t_drain) missing("T_D");
    BathPair b;
    b.source = {BathLabel::Source, alpha_source.value_or(0.0), omega_c_source, *t_source};
    b.drain = {BathLabel::Drain, alpha_drain.value_or(0.0), omega_c_drain, *t_drain};
    return b;
}

ModelParams RunConfig::model() const {
    if (!n_qubits) missing("N");
    if (!alpha_source) missing("alpha");
    if (!alpha_drain) missing("alpha_D");
    ModelParams p;
    p.system.n_qubits = *n_qubits;
    p.system.eps0 = eps0;
    p.baths = baths();
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    return p;
}

ModelParams RunConfig::sweep_template() const {
    ModelParams p;
    p.system.n_qubits = n_qubits.value_or(1);
    p.system.eps0 = eps0;
    p.baths = baths();
    // Placeholder coupling; sweeps overwrite it.
    p.baths.source.alpha = p.baths.drain.alpha = alpha_min;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    return p;
}

FdOptions RunConfig::fd_options() const {
    if (fd_step < 0.0) throw ConfigError("config key 'fd_step' must be non-negative");
    if (!(tolerance > 0.0)) throw ConfigError("config key 'tolerance' must be positive");
    FdOptions fd;
    fd.step = fd_step;
    fd.rel_tolerance = tolerance;
    return fd;
}

SweepSpec RunConfig::sweep_spec() const {
    if (alpha_points < 2) throw ConfigError("config key 'alpha_points' must be at least 2");
    SweepSpec spec;
    try {
        spec.alphas = log_grid(alpha_min, alpha_max, static_cast<std::size_t>(alpha_points));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid alpha range: ") + e.what());
    }
    spec.sizes = n_list;
    spec.base = sweep_template();
    spec.objective = objective;
    spec.fd = fd_options();
    spec.threads = threads;
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid sweep: ") + e.what());
    }
    return spec;
}

OptOptions RunConfig::opt_options() const {
    const SweepSpec spec = sweep_spec();
    OptOptions opt;
    opt.grid = spec.alphas;
    opt.fd = spec.fd;
    return opt;
}

KernelGridSpec RunConfig::kernel_spec() const {
    if (!(kernel_dt > 0.0)) throw ConfigError("config key 'kernel_dt' must be positive");
    if (!(kernel_d_omega > 0.0)) throw ConfigError("config key 'kernel_d_omega' must be positive");
    KernelGridSpec spec;
    spec.dt = kernel_dt;
    spec.d_omega = kernel_d_omega;
    return spec;
}

}  // namespace cqt
