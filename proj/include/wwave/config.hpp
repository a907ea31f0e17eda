#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_core.hpp"

namespace wwave {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string key, const std::string& msg)
        : std::runtime_error(format(line, key, msg)), line(line), key(std::move(key)) {}
    int line;  // 0 when the problem is not tied to a line
    std::string key;

private:
    static std::string format(int line, const std::string& key, const std::string& msg) {
        std::string out = "config";
        if (line > 0) out += ":" + std::to_string(line);
        if (!key.empty()) out += ": key '" + key + "'";
        return out + ": " + msg;
    }
};

struct RunConfig {
    struct {
        std::size_t N = 0;
        long double L = 2 * std::numbers::pi_v<long double>;
    } grid;
    struct {
        double epsilon = 0;
        std::string profile = "single_mode";  // single_mode | packet | custom | random
        int k0 = 1;
        double k_center = 4;
        double width = 1.5;
        std::vector<std::complex<double>> coeffs;
        int modes = 8;  // random profile: number of modes
        std::complex<double> velocity_phase{0, 1};
    } physics;
    struct {
        std::optional<double> dt;
        std::optional<double> cfl;
        double T_final = 0;
        FilterRule filter = FilterRule::krasny(1e-13);
        FilterRule dealias;
        bool project_constraints = false;
        double residual_tol = 1e-6;
    } stepping;
    struct {
        int max_j = 1;
        int jet_order = -1;  // -1: max_j + 2
        int report_every = 1;
        bool quintic = false;
        bool e0_rate = true;
    } diagnostics;
    struct {
        std::string directory = "out";
        std::set<std::string> formats{"csv", "json"};
    } output;
    std::string precision = "double";  // double | long_double
    struct {
        double epsilon0 = 0.08;
        double ratio = 0.5;
        int count = 3;
        int threads = 1;
        std::vector<int> period_multipliers{1};
    } sweep;
    struct {
        std::vector<std::size_t> N_list{128, 256, 512};
        std::size_t N_ref = 1024;
    } converge;
    std::uint64_t seed = 0;

    int effective_jet_order() const { return diagnostics.jet_order < 0 ? diagnostics.max_j + 2 : diagnostics.jet_order; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (...) {
        return false;
    }
    return used == s.size() && std::isfinite(out);
}

// "2pi", "pi", "0.5pi" or a plain number
inline bool parse_length(const std::string& s, long double& out) {
    const long double pi = std::numbers::pi_v<long double>;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        std::string head = s.substr(0, s.size() - 2);
        double m = 1;
        if (!head.empty() && !parse_double(head, m)) return false;
        out = m * pi;
        return true;
    }
    double v;
    if (!parse_double(s, v)) return false;
    out = v;
    return true;
}

// "re" or "re:im"
inline bool parse_complex(const std::string& s, std::complex<double>& out) {
    auto p = s.find(':');
    double re = 0, im = 0;
    if (p == std::string::npos) {
        if (!parse_double(trim(s), re)) return false;
    } else if (!parse_double(trim(s.substr(0, p)), re) || !parse_double(trim(s.substr(p + 1)), im)) {
        return false;
    }
    out = {re, im};
    return true;
}

inline bool parse_filter(const std::string& s, FilterRule& r) {
    if (s == "none") r.kind = FilterRule::Kind::none;
    else if (s == "krasny") r.kind = FilterRule::Kind::krasny;
    else if (s == "smooth36") r.kind = FilterRule::Kind::smooth36;
    else return false;
    return true;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    using namespace detail;
    RunConfig c;
    std::map<std::string, int> seen;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "", "expected 'key = value'");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "", "empty key");
        if (val.empty()) throw ConfigError(lineno, key, "empty value");
        if (seen.count(key)) throw ConfigError(lineno, key, "duplicate key (first set on line " + std::to_string(seen[key]) + ")");
        seen[key] = lineno;

        auto bad = [&](const std::string& what) { return ConfigError(lineno, key, "invalid value '" + val + "': " + what); };
        auto num = [&] {
            double v;
            if (!parse_double(val, v)) throw bad("expected a number");
            return v;
        };
        auto integer = [&] {
            long long v;
            auto r = std::from_chars(val.data(), val.data() + val.size(), v);
            if (r.ec != std::errc() || r.ptr != val.data() + val.size()) throw bad("expected an integer");
            return v;
        };
        auto boolean = [&] {
            if (val == "true" || val == "1" || val == "on" || val == "yes") return true;
            if (val == "false" || val == "0" || val == "off" || val == "no") return false;
            throw bad("expected true or false");
        };

        if (key == "grid.N") {
            auto v = integer();
            if (v < 16 || (v & (v - 1)) != 0) throw bad("N must be a power of two >= 16");
            c.grid.N = std::size_t(v);
        } else if (key == "grid.L") {
            if (!parse_length(val, c.grid.L) || !(c.grid.L > 0)) throw bad("expected a positive length such as 6.28 or 2pi");
        } else if (key == "physics.epsilon") {
            c.physics.epsilon = num();
            if (c.physics.epsilon < 0) throw bad("epsilon must be >= 0");
        } else if (key == "physics.profile") {
            if (val != "single_mode" && val != "packet" && val != "custom" && val != "random")
                throw bad("expected single_mode, packet, custom or random");
            c.physics.profile = val;
        } else if (key == "physics.k0") {
            c.physics.k0 = int(integer());
            if (c.physics.k0 < 1) throw bad("k0 must be >= 1");
        } else if (key == "physics.k_center") {
            c.physics.k_center = num();
        } else if (key == "physics.width") {
            c.physics.width = num();
            if (!(c.physics.width > 0)) throw bad("width must be > 0");
        } else if (key == "physics.coeffs") {
            c.physics.coeffs.clear();
            for (const auto& item : split_list(val)) {
                std::complex<double> z;
                if (!parse_complex(item, z)) throw bad("expected a list of re or re:im entries");
                c.physics.coeffs.push_back(z);
            }
        } else if (key == "physics.modes") {
            c.physics.modes = int(integer());
            if (c.physics.modes < 1) throw bad("modes must be >= 1");
        } else if (key == "physics.velocity_phase") {
            if (!parse_complex(val, c.physics.velocity_phase) || std::abs(c.physics.velocity_phase) == 0)
                throw bad("expected a nonzero re or re:im");
        } else if (key == "stepping.dt") {
            c.stepping.dt = num();
            if (!(*c.stepping.dt > 0)) throw bad("dt must be > 0");
        } else if (key == "stepping.cfl") {
            c.stepping.cfl = num();
            if (!(*c.stepping.cfl > 0)) throw bad("cfl must be > 0");
        } else if (key == "stepping.T_final") {
            c.stepping.T_final = num();
            if (c.stepping.T_final < 0) throw bad("T_final must be >= 0");
        } else if (key == "stepping.filter") {
            if (!parse_filter(val, c.stepping.filter)) throw bad("expected none, krasny or smooth36");
        } else if (key == "stepping.filter_threshold") {
            c.stepping.filter.threshold = num();
            c.stepping.dealias.threshold = c.stepping.filter.threshold;
        } else if (key == "stepping.dealias") {
            if (!parse_filter(val, c.stepping.dealias)) throw bad("expected none, krasny or smooth36");
        } else if (key == "stepping.project_constraints") {
            c.stepping.project_constraints = boolean();
        } else if (key == "stepping.residual_tol") {
            c.stepping.residual_tol = num();
        } else if (key == "diagnostics.max_j") {
            c.diagnostics.max_j = int(integer());
            if (c.diagnostics.max_j < 0 || c.diagnostics.max_j > 4) throw bad("max_j must be in [0, 4]");
        } else if (key == "diagnostics.jet_order") {
            c.diagnostics.jet_order = int(integer());
            if (c.diagnostics.jet_order < 0 || c.diagnostics.jet_order > 8) throw bad("jet_order must be in [0, 8]");
        } else if (key == "diagnostics.report_every") {
            c.diagnostics.report_every = int(integer());
            if (c.diagnostics.report_every < 1) throw bad("report_every must be >= 1");
        } else if (key == "diagnostics.quintic") {
            c.diagnostics.quintic = boolean();
        } else if (key == "diagnostics.e0_rate") {
            c.diagnostics.e0_rate = boolean();
        } else if (key == "output.directory") {
            c.output.directory = val;
        } else if (key == "output.formats") {
            c.output.formats.clear();
            for (const auto& f : split_list(val)) {
                if (f != "csv" && f != "json") throw bad("formats are csv and json");
                c.output.formats.insert(f);
            }
        } else if (key == "numerics.precision") {
            if (val != "double" && val != "long_double") throw bad("expected double or long_double");
            c.precision = val;
        } else if (key == "sweep.epsilon0") {
            c.sweep.epsilon0 = num();
            if (!(c.sweep.epsilon0 > 0)) throw bad("epsilon0 must be > 0");
        } else if (key == "sweep.ratio") {
            c.sweep.ratio = num();
            if (!(c.sweep.ratio > 0) || c.sweep.ratio == 1) throw bad("ratio must be positive and != 1");
        } else if (key == "sweep.count") {
            c.sweep.count = int(integer());
            if (c.sweep.count < 3) throw bad("count must be >= 3");
        } else if (key == "sweep.threads") {
            c.sweep.threads = int(integer());
            if (c.sweep.threads < 1) throw bad("threads must be >= 1");
        } else if (key == "sweep.period_multipliers") {
            c.sweep.period_multipliers.clear();
            for (const auto& item : split_list(val)) {
                double m;
                if (!parse_double(item, m) || m < 1 || m != std::floor(m)) throw bad("expected positive integers");
                c.sweep.period_multipliers.push_back(int(m));
            }
            if (c.sweep.period_multipliers.empty()) throw bad("empty list");
        } else if (key == "converge.N_list") {
            c.converge.N_list.clear();
            for (const auto& item : split_list(val)) {
                double m;
                if (!parse_double(item, m) || m < 16 || m != std::floor(m) || (std::size_t(m) & (std::size_t(m) - 1)))
                    throw bad("expected powers of two >= 16");
                c.converge.N_list.push_back(std::size_t(m));
            }
        } else if (key == "converge.N_ref") {
            auto v = integer();
            if (v < 16 || (v & (v - 1)) != 0) throw bad("N_ref must be a power of two >= 16");
            c.converge.N_ref = std::size_t(v);
        } else if (key == "seed") {
            auto v = integer();
            if (v < 0) throw bad("seed must be >= 0");
            c.seed = std::uint64_t(v);
        } else {
            throw ConfigError(lineno, key, "unknown key");
        }
    }
    if (!seen.count("grid.N")) throw ConfigError(0, "grid.N", "missing required key");
    if (!seen.count("physics.epsilon")) throw ConfigError(0, "physics.epsilon", "missing required key");
    if (!seen.count("stepping.T_final")) throw ConfigError(0, "stepping.T_final", "missing required key");
    if (!c.stepping.dt && !c.stepping.cfl) throw ConfigError(0, "stepping.dt", "one of stepping.dt or stepping.cfl is required");
    if (c.stepping.dt && c.stepping.cfl) throw ConfigError(seen["stepping.cfl"], "stepping.cfl", "give stepping.dt or stepping.cfl, not both");
    if (c.physics.profile == "custom" && c.physics.coeffs.empty())
        throw ConfigError(0, "physics.coeffs", "custom profile needs physics.coeffs");
    if (c.effective_jet_order() < c.diagnostics.max_j + 2)
        throw ConfigError(seen.count("diagnostics.jet_order") ? seen["diagnostics.jet_order"] : 0, "diagnostics.jet_order",
                          "jet_order must be at least max_j + 2");
    return c;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace wwave
