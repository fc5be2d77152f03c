#include "popdyn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace popdyn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::stringstream ss(text);
    std::string line;
    int ln = 0;
    while (std::getline(ss, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(ln) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(ln) +
                              ": empty key");
        cfg.entries_[key] = value;
        cfg.lines_[key] = ln;
    }
    return cfg;
}

bool Config::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

void Config::missing(const std::string& key) const {
    throw ConfigError(origin_ + ": missing required field '" + key + "'");
}

void Config::bad_value(const std::string& key,
                       const std::string& expected) const {
    const int ln = lines_.count(key) ? lines_.at(key) : 0;
    throw ConfigError(origin_ + ":" + std::to_string(ln) + ": field '" + key +
                      "' expects " + expected + ", got '" + entries_.at(key) +
                      "'");
}

std::string Config::get_string(const std::string& key) const {
    if (!has(key)) missing(key);
    return entries_.at(key);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    return has(key) ? entries_.at(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    if (!has(key)) missing(key);
    const std::string& s = entries_.at(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') bad_value(key, "a real number");
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    if (!has(key)) missing(key);
    const std::string& s = entries_.at(key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') bad_value(key, "an integer");
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = entries_.at(key);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        bad_value(key, "an unsigned integer");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = entries_.at(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    bad_value(key, "a boolean (true/false)");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    if (!has(key)) missing(key);
    std::vector<double> out;
    std::stringstream ss(entries_.at(key));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) bad_value(key, "a comma-separated list of reals");
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            bad_value(key, "a comma-separated list of reals");
        out.push_back(v);
    }
    if (out.empty()) bad_value(key, "a comma-separated list of reals");
    return out;
}

std::vector<double> Config::get_double_list(
    const std::string& key, std::vector<double> fallback) const {
    return has(key) ? get_double_list(key) : fallback;
}

}  // namespace popdyn
