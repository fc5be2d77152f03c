#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "popdyn/errors.hpp"

namespace popdyn {

// Named positive rate parameters. Entries must be > 0 (rates have support on
// the positive reals); construction enforces this.
class ParamVector {
public:
    ParamVector() = default;

    ParamVector(std::initializer_list<std::pair<std::string, double>> entries) {
        for (const auto& [name, value] : entries) set(name, value);
    }

    void set(const std::string& name, double value) {
        if (!(value > 0.0))
            throw Error("parameter '" + name + "' must be positive, got " +
                        std::to_string(value));
        for (auto& [n, v] : entries_) {
            if (n == name) {
                v = value;
                return;
            }
        }
        entries_.emplace_back(name, value);
    }

    double get(std::string_view name) const {
        for (const auto& [n, v] : entries_)
            if (n == name) return v;
        throw Error("unknown parameter '" + std::string(name) + "'");
    }

    double operator[](int i) const { return entries_.at(i).second; }
    const std::string& name(int i) const { return entries_.at(i).first; }
    int size() const { return static_cast<int>(entries_.size()); }

    // Same names, values replaced positionally (used by optimizers and MCMC).
    ParamVector with_values(const std::vector<double>& values) const {
        if (values.size() != entries_.size())
            throw DimensionMismatch("with_values: expected " +
                                    std::to_string(entries_.size()) + " values");
        ParamVector out;
        for (std::size_t i = 0; i < values.size(); ++i)
            out.set(entries_[i].first, values[i]);
        return out;
    }

    static ParamVector sir(double beta, double gamma) {
        return {{"beta", beta}, {"gamma", gamma}};
    }
    static ParamVector seir(double beta, double alpha, double gamma) {
        return {{"beta", beta}, {"alpha", alpha}, {"gamma", gamma}};
    }

private:
    std::vector<std::pair<std::string, double>> entries_;
};

}  // namespace popdyn
