#pragma once

// Plot-ready trace export: CSV (9 significant digits, LF endings) and JSON.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmatch/em.hpp"
#include "cmatch/mixture.hpp"
#include "cmatch/rg.hpp"
#include "cmatch/test_cm.hpp"

namespace cmatch {

inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string mixture_trace_csv(const MixtureTrace& trace) {
    std::ostringstream out;
    out << "step_index,step_kind,G,R,R_Q,H_QP";
    if (!trace.steps.empty()) {
        for (std::size_t j = 0; j < trace.steps.front().model.size(); ++j)
            out << ",c" << j + 1 << ",d" << j + 1 << ",py" << j + 1;
    }
    out << "\n";
    for (std::size_t idx = 0; idx < trace.steps.size(); ++idx) {
        const auto& s = trace.steps[idx];
        out << idx << ',' << to_string(s.kind) << ',' << format_g9(s.monitor.G) << ','
            << format_g9(s.monitor.R) << ',' << format_g9(s.monitor.R_Q) << ','
            << format_g9(s.monitor.H_QP);
        for (std::size_t j = 0; j < s.model.size(); ++j)
            out << ',' << format_g9(s.model.components[j].center) << ','
                << format_g9(s.model.components[j].stddev) << ',' << format_g9(s.model.py[j]);
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json mixture_trace_json(const MixtureTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t idx = 0; idx < trace.steps.size(); ++idx) {
        const auto& s = trace.steps[idx];
        nlohmann::json comps = nlohmann::json::array();
        for (std::size_t j = 0; j < s.model.size(); ++j)
            comps.push_back({{"center", s.model.components[j].center},
                             {"stddev", s.model.components[j].stddev},
                             {"py", s.model.py[j]}});
        steps.push_back({{"step_index", idx},
                         {"step_kind", to_string(s.kind)},
                         {"G", s.monitor.G},
                         {"R", s.monitor.R},
                         {"R_Q", s.monitor.R_Q},
                         {"H_QP", s.monitor.H_QP},
                         {"components", comps}});
    }
    return {{"steps", steps},
            {"converged", trace.converged},
            {"right_steps", trace.right_steps}};
}

inline std::string test_trace_csv(const TestTrace& trace) {
    std::ostringstream out;
    out << "step_index,I_XTheta,boundaries\n";
    for (std::size_t idx = 0; idx < trace.steps.size(); ++idx) {
        const auto& s = trace.steps[idx];
        out << idx << ',' << format_g9(s.info_bits) << ',';
        for (std::size_t b = 0; b < s.boundaries.size(); ++b) {
            if (b) out << ' ';
            out << s.boundaries[b];
        }
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json test_trace_json(const TestTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t idx = 0; idx < trace.steps.size(); ++idx) {
        const auto& s = trace.steps[idx];
        steps.push_back({{"step_index", idx},
                         {"I_XTheta", s.info_bits},
                         {"boundaries", s.boundaries}});
    }
    return {{"steps", steps},
            {"converged", trace.converged},
            {"oscillated", trace.oscillated},
            {"iterations", trace.iterations},
            {"refinements", trace.refinements}};
}

inline std::string rg_curve_csv(const RGCurve& curve) {
    std::ostringstream out;
    out << "s,G,R\n";
    for (const auto& p : curve.points)
        out << format_g9(p.s) << ',' << format_g9(p.G) << ',' << format_g9(p.R) << "\n";
    return out.str();
}

inline nlohmann::json rg_curve_json(const RGCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve.points)
        pts.push_back({{"s", p.s}, {"G", p.G}, {"R", p.R}});
    return {{"points", pts}};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

}  // namespace cmatch
