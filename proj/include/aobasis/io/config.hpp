#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aobasis/criteria.hpp"
#include "aobasis/reference.hpp"
#include "aobasis/stiefel.hpp"

namespace aobasis::io {

// Run configuration. Defaults reproduce the reference setting: grid
// [-20, 20] with 1999 points, N = 10, ten equispaced points on [1.5, 5].
//
// File format: INI-style sections, `key = value`, `#` or `;` comments.
//
//   [grid]       x_max, n_points
//   [basis]      n_funcs, n_basis, criterion (JA_L2 | JA_H1 | JE)
//   [measure]    kind (uniform | points), a_min, a_max, count,
//                points ("a:w, a:w, ..."), mass
//   [optimizer]  grad_tol, max_iter, lbfgs_memory, random_start, cond_limit
//   [evaluate]   curve_a_min, curve_a_max, curve_count, density_a (list),
//                cond_a_min, cond_a_max, cond_count, cond_n_basis (list)
//   [output]     out_dir, cache_dir
//
// Unknown sections or keys are errors.
struct RunConfig {
    std::optional<double> x_max;  // unset: default_x_max(a_extent())
    int n_points = 1999;

    int n_funcs = 10;
    int n_basis = 2;
    CriterionKind criterion = CriterionKind::JE;

    Measure measure = default_measure();

    OptimSettings optimizer;
    bool random_start = false;
    double cond_limit = kDefaultCondLimit;
    unsigned long long seed = 0;

    double curve_a_min = 1.5;
    double curve_a_max = 5.0;
    int curve_count = 50;
    std::vector<double> density_a = {1.925, 3.0};
    double cond_a_min = 0.1;
    double cond_a_max = 5.0;
    int cond_count = 50;
    std::vector<int> cond_n_basis = {1, 2, 4, 8};

    std::filesystem::path out_dir = "out";
    std::filesystem::path cache_dir = "cache";

    // Largest configuration anything in the run touches.
    double a_extent() const {
        double a = std::max(measure.a_max(), curve_a_max);
        for (double d : density_a) a = std::max(a, d);
        return a;
    }

    Grid grid() const { return Grid(x_max ? *x_max : default_x_max(a_extent()), n_points); }

    void validate() const {
        measure.validate();
        optimizer.validate();
        if (n_funcs < 1) throw InvalidArgument("config: basis.n_funcs must be >= 1");
        if (n_basis < 1 || n_basis > n_funcs) throw InvalidArgument("config: need 1 <= basis.n_basis <= basis.n_funcs");
        if (!(cond_limit > 1.0)) throw InvalidArgument("config: optimizer.cond_limit must exceed 1");
        if (curve_count < 1 || cond_count < 1) throw InvalidArgument("config: sweep counts must be >= 1");
        if (curve_a_min > curve_a_max || cond_a_min > cond_a_max)
            throw InvalidArgument("config: sweep intervals must satisfy min <= max");
        for (int nb : cond_n_basis)
            if (nb < 1) throw InvalidArgument("config: evaluate.cond_n_basis entries must be >= 1");
        const Grid g = grid();
        auto check_fit = [&](double a, const char* what) {
            if (!dimer_fits(g, a, n_funcs)) {
                std::ostringstream msg;
                msg << "config: " << what << " a = " << a << " does not fit the grid (x_max = " << g.x_max() << ")";
                throw InvalidArgument(msg.str());
            }
        };
        for (const auto& p : measure.points) check_fit(p.a, "measure point");
        check_fit(curve_a_max, "evaluate.curve_a_max");
        for (double a : density_a) check_fit(a, "evaluate.density_a");
    }
};

namespace detail {

inline std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw InvalidArgument("config: " + key + " expects a number, got '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw InvalidArgument("config: " + key + " expects an integer, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidArgument("config: " + key + " expects true/false, got '" + v + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::string> kv;  // "section.key" -> value
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw InvalidArgument("config line " + std::to_string(lineno) + ": bad section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": key outside a section");
        const std::string key = section + "." + detail::trim(line.substr(0, eq));
        if (kv.count(key)) throw InvalidArgument("config: duplicate key " + key);
        kv[key] = detail::trim(line.substr(eq + 1));
    }

    std::string measure_kind = "uniform";
    double m_min = 1.5, m_max = 5.0;
    int m_count = 10;
    std::optional<std::string> m_points;
    std::optional<double> m_mass;

    for (const auto& [key, v] : kv) {
        if (key == "grid.x_max") cfg.x_max = detail::parse_double(key, v);
        else if (key == "grid.n_points") cfg.n_points = static_cast<int>(detail::parse_int(key, v));
        else if (key == "basis.n_funcs") cfg.n_funcs = static_cast<int>(detail::parse_int(key, v));
        else if (key == "basis.n_basis") cfg.n_basis = static_cast<int>(detail::parse_int(key, v));
        else if (key == "basis.criterion") cfg.criterion = criterion_from_string(v);
        else if (key == "measure.kind") measure_kind = v;
        else if (key == "measure.a_min") m_min = detail::parse_double(key, v);
        else if (key == "measure.a_max") m_max = detail::parse_double(key, v);
        else if (key == "measure.count") m_count = static_cast<int>(detail::parse_int(key, v));
        else if (key == "measure.points") m_points = v;
        else if (key == "measure.mass") m_mass = detail::parse_double(key, v);
        else if (key == "optimizer.grad_tol") cfg.optimizer.grad_tol = detail::parse_double(key, v);
        else if (key == "optimizer.max_iter") cfg.optimizer.max_iter = static_cast<int>(detail::parse_int(key, v));
        else if (key == "optimizer.lbfgs_memory") cfg.optimizer.lbfgs_memory = static_cast<int>(detail::parse_int(key, v));
        else if (key == "optimizer.random_start") cfg.random_start = detail::parse_bool(key, v);
        else if (key == "optimizer.cond_limit") cfg.cond_limit = detail::parse_double(key, v);
        else if (key == "evaluate.curve_a_min") cfg.curve_a_min = detail::parse_double(key, v);
        else if (key == "evaluate.curve_a_max") cfg.curve_a_max = detail::parse_double(key, v);
        else if (key == "evaluate.curve_count") cfg.curve_count = static_cast<int>(detail::parse_int(key, v));
        else if (key == "evaluate.density_a") {
            cfg.density_a.clear();
            for (const auto& s : detail::split(v, ',')) cfg.density_a.push_back(detail::parse_double(key, s));
        }
        else if (key == "evaluate.cond_a_min") cfg.cond_a_min = detail::parse_double(key, v);
        else if (key == "evaluate.cond_a_max") cfg.cond_a_max = detail::parse_double(key, v);
        else if (key == "evaluate.cond_count") cfg.cond_count = static_cast<int>(detail::parse_int(key, v));
        else if (key == "evaluate.cond_n_basis") {
            cfg.cond_n_basis.clear();
            for (const auto& s : detail::split(v, ','))
                cfg.cond_n_basis.push_back(static_cast<int>(detail::parse_int(key, s)));
        }
        else if (key == "output.out_dir") cfg.out_dir = v;
        else if (key == "output.cache_dir") cfg.cache_dir = v;
        else throw InvalidArgument("config: unknown key " + key);
    }

    if (measure_kind == "uniform") {
        if (m_points) throw InvalidArgument("config: measure.points requires measure.kind = points");
        cfg.measure = uniform_measure(m_min, m_max, m_count);
        if (m_mass) cfg.measure.mass = *m_mass;
    } else if (measure_kind == "points") {
        if (!m_points) throw InvalidArgument("config: measure.kind = points needs measure.points");
        Measure m;
        for (const auto& item : detail::split(*m_points, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw InvalidArgument("config: measure.points entries must be a:w, got '" + item + "'");
            m.points.push_back({detail::parse_double("measure.points", detail::trim(item.substr(0, colon))),
                                detail::parse_double("measure.points", detail::trim(item.substr(colon + 1)))});
        }
        m.mass = m_mass.value_or(1.0);
        cfg.measure = std::move(m);
    } else {
        throw InvalidArgument("config: measure.kind must be uniform or points, got '" + measure_kind + "'");
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read config file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace aobasis::io
