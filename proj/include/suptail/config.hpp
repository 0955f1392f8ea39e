#pragma once

// Run-configuration text format:
//   key = value            one assignment per line
//   # ...                  comments (full-line or trailing), blank lines ignored
// Keys are lowercase [a-z0-9_]+.  Values are numbers, words, comma-separated
// lists, or colon pairs for tabulated tails:  knots = -1:1, 0:0.5, 40:1e-4.
// Serialization is canonical (sorted keys), so parse(serialize(c)) == c.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "suptail/distribution.hpp"
#include "suptail/errors.hpp"

namespace suptail {

namespace config_detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char ch : k)
        if (!(std::islower(static_cast<unsigned char>(ch)) ||
              std::isdigit(static_cast<unsigned char>(ch)) || ch == '_'))
            return false;
    return true;
}

inline double parse_real(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty() || v[0] == '-')
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    const char* begin = v.c_str();
    char* end = nullptr;
    const unsigned long long x = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace config_detail

class Config {
  public:
    Config() = default;

    static Config parse(std::istream& in) {
        Config cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string stripped = config_detail::trim(line);
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = config_detail::trim(stripped.substr(0, eq));
            const std::string value = config_detail::trim(stripped.substr(eq + 1));
            if (!config_detail::valid_key(key))
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": invalid key '" + key + "'");
            if (value.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty value for key '" + key + "'");
            if (!cfg.entries_.emplace(key, value).second)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    const std::string& get_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("missing required config key '" + key + "'");
        return it->second;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double get_real(const std::string& key) const {
        return config_detail::parse_real(key, get_string(key));
    }
    double get_real(const std::string& key, double fallback) const {
        return has(key) ? get_real(key) : fallback;
    }

    std::uint64_t get_uint(const std::string& key) const {
        return config_detail::parse_uint(key, get_string(key));
    }
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_uint(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        return has(key) ? config_detail::parse_bool(key, get_string(key)) : fallback;
    }

    std::vector<double> get_real_list(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& item : config_detail::split(get_string(key), ','))
            out.push_back(config_detail::parse_real(key, item));
        if (out.empty()) throw ConfigError("key '" + key + "': empty list");
        return out;
    }

    std::vector<std::pair<double, double>> get_pair_list(const std::string& key) const {
        std::vector<std::pair<double, double>> out;
        for (const std::string& item : config_detail::split(get_string(key), ',')) {
            const auto parts = config_detail::split(item, ':');
            if (parts.size() != 2)
                throw ConfigError("key '" + key + "': expected colon pairs 'x:tail'");
            out.emplace_back(config_detail::parse_real(key, parts[0]),
                             config_detail::parse_real(key, parts[1]));
        }
        return out;
    }

    // Canonical text form; parse(serialize()) reproduces the same entries.
    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += k;
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }

    void restrict_keys(const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : entries_)
            if (!allowed.count(k))
                throw ConfigError("unknown config key '" + k + "' for this command");
    }

    bool operator==(const Config& other) const { return entries_ == other.entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

// Config keys describing an increment law; shared by several commands.
inline const std::set<std::string>& distribution_config_keys() {
    static const std::set<std::string> keys = {
        "family",       "alpha",        "drift_c",           "scale_l",
        "weibull_exponent", "log_exponent", "knots",         "heavy_tail_assumed"};
    return keys;
}

inline DistributionSpec spec_from_config(const Config& cfg) {
    const std::string family = cfg.get_string("family");
    if (family == "pareto")
        return DistributionSpec::pareto_shift(cfg.get_real("alpha"), cfg.get_real("drift_c"),
                                              cfg.get_real("scale_l", 1.0));
    if (family == "weibull")
        return DistributionSpec::weibull_shift(cfg.get_real("weibull_exponent"),
                                               cfg.get_real("drift_c"));
    if (family == "lognormal_type" || family == "lognormal")
        return DistributionSpec::lognormal_type_shift(cfg.get_real("log_exponent"),
                                                      cfg.get_real("drift_c"));
    if (family == "custom")
        return DistributionSpec::custom(cfg.get_pair_list("knots"),
                                        cfg.get_bool("heavy_tail_assumed", true));
    throw ConfigError("unknown family '" + family +
                      "' (expected pareto, weibull, lognormal_type, or custom)");
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("geometric grid needs 0 < lo < hi");
    if (n < 2) throw ConfigError("geometric grid needs at least 2 points");
    std::vector<double> out(n);
    const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo * std::exp(ratio * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (!(hi > lo)) throw ConfigError("linear grid needs lo < hi");
    if (n < 2) throw ConfigError("linear grid needs at least 2 points");
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace suptail
