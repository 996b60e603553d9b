#include "fpe/config.hpp"

#include "fpe/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fpe {

SdeModel RunConfig::make_model() const {
    SdeModel m;
    m.f = make_drift(f);
    m.g = make_drift(g);
    m.f_name = f;
    m.g_name = g;
    m.sigma1 = sigma1;
    m.sigma2 = sigma2;
    m.epsilon = epsilon;
    m.R = R;
    m.kind = (kind == "ou") ? DriftKind::OrnsteinUhlenbeck : DriftKind::GeneralAdditive;
    return m;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        auto unknown = [&]() -> ConfigError {
            return ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
        };

        if (section == "model") {
            if (key == "kind") cfg.kind = val;
            else if (key == "f") cfg.f = val;
            else if (key == "g") cfg.g = val;
            else if (key == "sigma1") cfg.sigma1 = to_double(key, val);
            else if (key == "sigma2") cfg.sigma2 = to_double(key, val);
            else if (key == "epsilon") cfg.epsilon = to_double(key, val);
            else if (key == "R") cfg.R = to_double(key, val);
            else throw unknown();
        } else if (section == "disc") {
            if (key == "X") cfg.disc.X = to_double(key, val);
            else if (key == "nx") cfg.disc.nx = int(to_long(key, val));
            else if (key == "ny") cfg.disc.ny = int(to_long(key, val));
            else if (key == "dt") cfg.disc.dt = to_double(key, val);
            else if (key == "quad_nodes") cfg.disc.quad_nodes = int(to_long(key, val));
            else throw unknown();
        } else if (section == "splitting") {
            if (key == "zeta") cfg.zeta = to_double(key, val);
            else if (key == "include_diffusion_prefactor")
                cfg.include_diffusion_prefactor = to_long(key, val) != 0;
            else throw unknown();
        } else if (section == "manifold") {
            if (key == "lp_tol") cfg.lp_tol = to_double(key, val);
            else if (key == "mesh_nodes") cfg.lp_mesh_nodes = int(to_long(key, val));
            else if (key == "T_lp") cfg.lp_T = to_double(key, val);
            else if (key == "max_iter") cfg.lp_max_iter = int(to_long(key, val));
            else throw unknown();
        } else if (section == "sweep") {
            if (key == "eps_list") {
                cfg.eps_list.clear();
                for (const auto& s : split_list(val)) cfg.eps_list.push_back(to_double(key, s));
            } else if (key == "J_list") {
                cfg.J_list.clear();
                for (const auto& s : split_list(val)) cfg.J_list.push_back(int(to_long(key, s)));
            } else if (key == "quantities") {
                cfg.quantities = split_list(val);
            } else if (key == "J") {
                cfg.J = int(to_long(key, val));
            } else if (key == "out") {
                cfg.out_dir = val;
            } else if (key == "seed") {
                cfg.seed = std::uint64_t(to_long(key, val));
            } else {
                throw unknown();
            }
        } else if (section == "acceptance") {
            if (key == "slope_slow") cfg.slope_slow = to_double(key, val);
            else if (key == "slope_slow_tol") cfg.slope_slow_tol = to_double(key, val);
            else if (key == "slope_manifold") cfg.slope_manifold = to_double(key, val);
            else if (key == "slope_manifold_tol") cfg.slope_manifold_tol = to_double(key, val);
            else if (key == "slope_gap") cfg.slope_gap = to_double(key, val);
            else if (key == "slope_gap_tol") cfg.slope_gap_tol = to_double(key, val);
            else if (key == "fast_rate_tol") cfg.fast_rate_tol = to_double(key, val);
            else throw unknown();
        } else {
            throw ConfigError("config: unknown section [" + section + "]");
        }
    }
    if (!(cfg.epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace fpe
