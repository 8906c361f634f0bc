#pragma once

// Line-oriented experiment configuration: [section] headers and key = value
// pairs, comments with '#'. Unknown sections or keys are rejected up front;
// a parsed config serializes back to an equivalent file.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmatch {

enum class ExperimentKind { test, estimation, mixture, em, rg_curve, trials };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::test: return "test";
        case ExperimentKind::estimation: return "estimation";
        case ExperimentKind::mixture: return "mixture";
        case ExperimentKind::em: return "em";
        case ExperimentKind::rg_curve: return "rg_curve";
        case ExperimentKind::trials: return "trials";
    }
    return "?";
}

inline ExperimentKind experiment_kind_from(const std::string& s) {
    if (s == "test") return ExperimentKind::test;
    if (s == "estimation") return ExperimentKind::estimation;
    if (s == "mixture") return ExperimentKind::mixture;
    if (s == "em") return ExperimentKind::em;
    if (s == "rg_curve") return ExperimentKind::rg_curve;
    if (s == "trials") return ExperimentKind::trials;
    throw std::invalid_argument("config: unknown kind '" + s + "'");
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::test;
    double tol = 0.001;
    std::uint64_t seed = 1;
    int grid_lo = 1;
    int grid_hi = 100;
    std::size_t max_right_steps = 200;
    std::size_t max_iterations = 100;

    // test / estimation scenarios
    std::vector<double> priors;
    std::vector<double> centers;
    std::vector<double> stddevs;
    std::vector<int> init_boundaries;
    std::optional<std::size_t> neutral_label;
    bool neutral_as_tautology = true;

    // mixture / em scenarios
    std::vector<double> true_centers, true_stddevs, true_weights;
    std::vector<double> init_centers, init_stddevs, init_weights;

    // rg_curve sweeps
    double payoff_b = 0.0, payoff_a = 0.0;
    double s_min = -4.0, s_max = 4.0;
    std::size_t s_count = 81;

    // trials
    std::size_t n_trials = 1000;
    bool run_em_too = false;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<double> parse_reals(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config: empty list element");
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size())
            throw std::invalid_argument("config: bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_reals(s)) {
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::invalid_argument("config: expected integer, got " + std::to_string(v));
        out.push_back(i);
    }
    return out;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("config: bad boolean '" + s + "'");
}

inline double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::invalid_argument("config: bad number '" + s + "'");
    return v;
}

inline std::string real_repr(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string join_reals(const std::vector<double>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
        out << buf;
    }
    return out.str();
}

inline std::string join_ints(const std::vector<int>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << v[i];
    }
    return out.str();
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::string section;
    std::istringstream in(text);
    std::string line;
    bool kind_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "scenario" && section != "init" &&
                section != "true_model" && section != "payoff" && section != "trials")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        auto fail_unknown = [&]() {
            throw std::invalid_argument("config: unknown key '" + key + "' in section [" +
                                        section + "]");
        };
        if (section == "experiment") {
            if (key == "kind") { c.kind = experiment_kind_from(value); kind_seen = true; }
            else if (key == "tol") c.tol = detail::parse_real(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "max_right_steps") c.max_right_steps = std::stoul(value);
            else if (key == "max_iterations") c.max_iterations = std::stoul(value);
            else fail_unknown();
        } else if (section == "scenario") {
            if (key == "grid_lo") c.grid_lo = std::stoi(value);
            else if (key == "grid_hi") c.grid_hi = std::stoi(value);
            else if (key == "priors") c.priors = detail::parse_reals(value);
            else if (key == "centers") c.centers = detail::parse_reals(value);
            else if (key == "stddevs") c.stddevs = detail::parse_reals(value);
            else if (key == "neutral_label") c.neutral_label = std::stoul(value);
            else if (key == "neutral_as_tautology") c.neutral_as_tautology = detail::parse_bool(value);
            else fail_unknown();
        } else if (section == "true_model") {
            if (key == "centers") c.true_centers = detail::parse_reals(value);
            else if (key == "stddevs") c.true_stddevs = detail::parse_reals(value);
            else if (key == "weights") c.true_weights = detail::parse_reals(value);
            else fail_unknown();
        } else if (section == "init") {
            if (key == "boundaries") c.init_boundaries = detail::parse_ints(value);
            else if (key == "centers") c.init_centers = detail::parse_reals(value);
            else if (key == "stddevs") c.init_stddevs = detail::parse_reals(value);
            else if (key == "weights") c.init_weights = detail::parse_reals(value);
            else fail_unknown();
        } else if (section == "payoff") {
            if (key == "b") c.payoff_b = detail::parse_real(value);
            else if (key == "a") c.payoff_a = detail::parse_real(value);
            else if (key == "priors") c.priors = detail::parse_reals(value);
            else if (key == "s_min") c.s_min = detail::parse_real(value);
            else if (key == "s_max") c.s_max = detail::parse_real(value);
            else if (key == "s_count") c.s_count = std::stoul(value);
            else fail_unknown();
        } else if (section == "trials") {
            if (key == "n_trials") c.n_trials = std::stoul(value);
            else if (key == "run_em") c.run_em_too = detail::parse_bool(value);
            else fail_unknown();
        } else {
            throw std::invalid_argument("config: key before any [section] at line " +
                                        std::to_string(lineno));
        }
    }
    if (!kind_seen)
        throw std::invalid_argument("config: missing kind in [experiment]");
    return c;
}

inline std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "kind = " << to_string(c.kind) << "\n";
    out << "tol = " << detail::real_repr(c.tol) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "max_right_steps = " << c.max_right_steps << "\n";
    out << "max_iterations = " << c.max_iterations << "\n";
    if (c.kind == ExperimentKind::test || c.kind == ExperimentKind::estimation) {
        out << "\n[scenario]\n";
        out << "grid_lo = " << c.grid_lo << "\n";
        out << "grid_hi = " << c.grid_hi << "\n";
        out << "priors = " << detail::join_reals(c.priors) << "\n";
        out << "centers = " << detail::join_reals(c.centers) << "\n";
        out << "stddevs = " << detail::join_reals(c.stddevs) << "\n";
        if (c.neutral_label) out << "neutral_label = " << *c.neutral_label << "\n";
        if (!c.neutral_as_tautology) out << "neutral_as_tautology = false\n";
        out << "\n[init]\n";
        out << "boundaries = " << detail::join_ints(c.init_boundaries) << "\n";
    } else if (c.kind == ExperimentKind::mixture || c.kind == ExperimentKind::em) {
        out << "\n[scenario]\n";
        out << "grid_lo = " << c.grid_lo << "\n";
        out << "grid_hi = " << c.grid_hi << "\n";
        out << "\n[true_model]\n";
        out << "centers = " << detail::join_reals(c.true_centers) << "\n";
        out << "stddevs = " << detail::join_reals(c.true_stddevs) << "\n";
        out << "weights = " << detail::join_reals(c.true_weights) << "\n";
        out << "\n[init]\n";
        out << "centers = " << detail::join_reals(c.init_centers) << "\n";
        out << "stddevs = " << detail::join_reals(c.init_stddevs) << "\n";
        out << "weights = " << detail::join_reals(c.init_weights) << "\n";
    } else if (c.kind == ExperimentKind::rg_curve) {
        out << "\n[payoff]\n";
        out << "b = " << detail::real_repr(c.payoff_b) << "\n";
        out << "a = " << detail::real_repr(c.payoff_a) << "\n";
        out << "priors = " << detail::join_reals(c.priors) << "\n";
        out << "s_min = " << detail::real_repr(c.s_min) << "\n";
        out << "s_max = " << detail::real_repr(c.s_max) << "\n";
        out << "s_count = " << c.s_count << "\n";
    } else if (c.kind == ExperimentKind::trials) {
        out << "\n[trials]\n";
        out << "n_trials = " << c.n_trials << "\n";
        out << "run_em = " << (c.run_em_too ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace cmatch
