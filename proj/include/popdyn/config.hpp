#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "popdyn/errors.hpp"

namespace popdyn {

// Flat `key = value` configuration text: one assignment per line, `#` starts
// a comment, values keep their text until typed access. Duplicate keys keep
// the last assignment.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text,
                             const std::string& origin = "<config>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list of reals.
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    [[noreturn]] void missing(const std::string& key) const;
    [[noreturn]] void bad_value(const std::string& key,
                                const std::string& expected) const;

    std::string origin_;
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;
};

}  // namespace popdyn
