#include "popdyn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "popdyn/util.hpp"

namespace popdyn {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // Trim surrounding whitespace.
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool is_na(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

double parse_double(const std::string& s, const std::string& path, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw MalformedRow(path + ":" + std::to_string(line) +
                           ": cannot parse number '" + s + "'");
    return v;
}

long long parse_count(const std::string& s, const std::string& path, int line) {
    const double v = parse_double(s, path, line);
    const long long r = std::llround(v);
    if (std::abs(v - static_cast<double>(r)) > 1e-9 || r < 0)
        throw MalformedRow(path + ":" + std::to_string(line) +
                           ": expected a nonnegative integer, got '" + s + "'");
    return r;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& class_names) {
    traj.check();
    if (static_cast<int>(class_names.size()) != traj.dim())
        throw DimensionMismatch("write_trajectory_csv: class name count");
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "t";
    for (const auto& n : class_names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_full(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.states[i].size(); ++j)
            out << "," << format_full(traj.states[i][j]);
        out << "\n";
    }
}

TrajectoryCsv read_trajectory_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw MalformedRow(path + ":1: empty file");
    const auto header = split_row(lines[0]);
    if (header.size() < 2 || header[0] != "t")
        throw MalformedRow(path + ":1: expected header 't,<class>,...'");

    TrajectoryCsv out;
    out.class_names.assign(header.begin() + 1, header.end());
    const std::size_t d = out.class_names.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_row(lines[i]);
        const int ln = static_cast<int>(i) + 1;
        if (cells.size() != d + 1)
            throw MalformedRow(path + ":" + std::to_string(ln) +
                               ": expected " + std::to_string(d + 1) +
                               " columns, got " + std::to_string(cells.size()));
        const double t = parse_double(cells[0], path, ln);
        if (!out.trajectory.times.empty() && t <= out.trajectory.times.back())
            throw NonMonotoneTime(path + ":" + std::to_string(ln) +
                                  ": times must be strictly increasing");
        Vec x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = parse_double(cells[j + 1], path, ln);
        out.trajectory.times.push_back(t);
        out.trajectory.states.push_back(std::move(x));
    }
    if (out.trajectory.times.empty())
        throw MalformedRow(path + ":1: no data rows");
    return out;
}

Trajectory reorder_classes(const TrajectoryCsv& data,
                           const std::vector<std::string>& order) {
    if (order.size() != data.class_names.size())
        throw DimensionMismatch("reorder_classes: class count mismatch");
    std::vector<std::size_t> src(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto it = std::find(data.class_names.begin(),
                                  data.class_names.end(), order[j]);
        if (it == data.class_names.end())
            throw DimensionMismatch("reorder_classes: missing class '" +
                                    order[j] + "'");
        src[j] = static_cast<std::size_t>(it - data.class_names.begin());
    }
    Trajectory out;
    out.times = data.trajectory.times;
    out.N = data.trajectory.N;
    for (const Vec& x : data.trajectory.states) {
        Vec y(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) y[j] = x[src[j]];
        out.states.push_back(std::move(y));
    }
    return out;
}

std::vector<BinomialObservation> read_binomial_csv(
    const std::string& path, std::vector<std::string>* warnings) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw MalformedRow(path + ":1: empty file");
    const auto header = split_row(lines[0]);
    if (header.size() < 3 || header[0] != "t" || header[1] != "n" ||
        header[2] != "y")
        throw MalformedRow(path + ":1: expected header 't,n,y[,...]'");

    std::vector<BinomialObservation> obs;
    double last_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_row(lines[i]);
        const int ln = static_cast<int>(i) + 1;
        if (cells.size() < 3)
            throw MalformedRow(path + ":" + std::to_string(ln) +
                               ": expected at least 3 columns");
        const double t = parse_double(cells[0], path, ln);
        if (t <= last_t)
            throw NonMonotoneTime(path + ":" + std::to_string(ln) +
                                  ": times must be strictly increasing");
        last_t = t;
        if (is_na(cells[1]) || is_na(cells[2])) {
            if (warnings)
                warnings->push_back(path + ":" + std::to_string(ln) +
                                    ": missing counts, row dropped");
            continue;
        }
        BinomialObservation b;
        b.t = t;
        b.n = parse_count(cells[1], path, ln);
        b.y = parse_count(cells[2], path, ln);
        if (b.y > b.n)
            throw MalformedRow(path + ":" + std::to_string(ln) +
                               ": y exceeds n");
        obs.push_back(b);
    }
    return obs;
}

void write_covid_csv(const std::string& path,
                     const std::vector<CovidRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "t,n,y,on_ship\n";
    for (const CovidRow& r : rows) {
        out << r.day << ",";
        if (r.has_obs)
            out << r.n << "," << r.y;
        else
            out << "NA,NA";
        out << "," << r.on_ship << "\n";
    }
}

void write_chain_csv(const std::string& path, const PosteriorChain& chain) {
    if (chain.samples.empty()) throw Error("write_chain_csv: empty chain");
    if (chain.names.size() !=
        static_cast<std::size_t>(chain.samples.front().size()))
        throw DimensionMismatch("write_chain_csv: name/sample size mismatch");
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "iter";
    for (const auto& n : chain.names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
        out << (chain.burn_in + static_cast<long long>(i));
        const Vec& s = chain.samples[i];
        for (Eigen::Index j = 0; j < s.size(); ++j)
            out << "," << format_full(s[j]);
        out << "\n";
    }
}

std::vector<CovidRow> read_covid_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw MalformedRow(path + ":1: empty file");
    const auto header = split_row(lines[0]);
    if (header.size() != 4 || header[0] != "t" || header[1] != "n" ||
        header[2] != "y" || header[3] != "on_ship")
        throw MalformedRow(path + ":1: expected header 't,n,y,on_ship'");

    std::vector<CovidRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_row(lines[i]);
        const int ln = static_cast<int>(i) + 1;
        if (cells.size() != 4)
            throw MalformedRow(path + ":" + std::to_string(ln) +
                               ": expected 4 columns");
        CovidRow r;
        r.day = static_cast<int>(parse_count(cells[0], path, ln));
        r.has_obs = !(is_na(cells[1]) || is_na(cells[2]));
        if (r.has_obs) {
            r.n = parse_count(cells[1], path, ln);
            r.y = parse_count(cells[2], path, ln);
            if (r.y > r.n)
                throw MalformedRow(path + ":" + std::to_string(ln) +
                                   ": y exceeds n");
        }
        r.on_ship = parse_count(cells[3], path, ln);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace popdyn
