#pragma once

// Named presets reproducing the worked examples: three test/estimation
// scenarios and two mixture scenarios. Each preset embeds its expected
// numbers and reports pass/fail per check.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cmatch/em.hpp"
#include "cmatch/mixture.hpp"
#include "cmatch/prob.hpp"
#include "cmatch/test_cm.hpp"
#include "cmatch/trace_io.hpp"

namespace cmatch {

struct PresetCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PresetResult {
    std::string name;
    bool passed = false;
    std::vector<PresetCheck> checks;
    std::string summary;                       // key = value lines
    std::variant<std::monostate, TestTrace, MixtureTrace> trace;

    void add_check(const std::string& check, bool ok, const std::string& detail) {
        checks.push_back({check, ok, detail});
    }
    void finish() {
        passed = true;
        for (const auto& c : checks) passed = passed && c.passed;
    }
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"test-ex1",     "test-ex2", "test-ex3-good",
                                                   "test-ex3-bad", "mix-ex1",  "mix-ex2"};
    return names;
}

namespace detail {

inline bool near(double value, double expect, double tol) {
    return std::abs(value - expect) <= tol;
}

inline std::string fmt(double v) { return format_g9(v); }

inline std::string bounds_str(const std::vector<int>& b) {
    std::ostringstream out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) out << ' ';
        out << b[i];
    }
    return out.str();
}

inline PresetResult run_test_preset(const std::string& name, const TestScenario& sc,
                                    const Partition& init) {
    PresetResult res;
    res.name = name;
    TestTrace trace = run_cm_test(sc, init);
    MatchedSemantics final_ms = right_step(sc, trace.final_step().partition);
    double i_xy = mutual_information(sc.prior, final_ms.channel);
    double h_x = entropy(sc.prior);

    std::vector<std::vector<double>> cond_rows(sc.grid_size(),
                                               std::vector<double>(sc.n_classes()));
    for (std::size_t k = 0; k < sc.grid_size(); ++k)
        for (std::size_t i = 0; i < sc.n_classes(); ++i) cond_rows[k][i] = sc.cond[i][k];
    double i_xz =
        mutual_information(sc.prior, Channel(sc.classes, sc.grid, cond_rows));

    std::ostringstream sum;
    sum << "preset = " << name << "\n";
    sum << "converged = " << (trace.converged ? "true" : "false") << "\n";
    sum << "iterations = " << trace.iterations << "\n";
    sum << "refinements = " << trace.refinements << "\n";
    sum << "boundaries = " << bounds_str(trace.final_step().boundaries) << "\n";
    sum << "H_X_bits = " << fmt(h_x) << "\n";
    sum << "I_XZ_bits = " << fmt(i_xz) << "\n";
    sum << "I_XY_bits = " << fmt(i_xy) << "\n";
    sum << "I_XTheta_bits = " << fmt(final_ms.semantic_info) << "\n";
    res.summary = sum.str();
    res.trace = trace;
    return res;
}

}  // namespace detail

inline PresetResult preset_test_ex1() {
    TestScenario sc = TestScenario::gaussian({0.8, 0.2}, {30.0, 70.0}, {15.0, 10.0}, 2);
    Partition init = Partition::from_boundaries(sc.grid_size(), {50}, {0, 1});
    PresetResult res = detail::run_test_preset("test-ex1", sc, init);
    const TestTrace& tr = std::get<TestTrace>(res.trace);

    std::vector<int> seq;
    for (const auto& s : tr.steps)
        seq.push_back(s.boundaries.empty() ? -1 : s.boundaries[0]);
    bool seq_ok = seq.size() >= 4 && seq[0] == 50 && seq[1] == 53 && seq[2] == 54 && seq[3] == 54;
    res.add_check("boundary_sequence_50_53_54_54", seq_ok,
                  "got " + detail::bounds_str(seq));
    res.add_check("z_star_54", tr.converged && tr.final_step().boundaries == std::vector<int>{54},
                  "boundaries " + detail::bounds_str(tr.final_step().boundaries));

    MatchedSemantics ms = right_step(sc, tr.final_step().partition);
    double i_xy = mutual_information(sc.prior, ms.channel);
    double h_x = entropy(sc.prior);
    res.add_check("H_X_0.72", detail::near(h_x, 0.72, 0.01), detail::fmt(h_x));
    std::vector<std::vector<double>> cond_rows(sc.grid_size(), std::vector<double>(2));
    for (std::size_t k = 0; k < sc.grid_size(); ++k)
        for (std::size_t i = 0; i < 2; ++i) cond_rows[k][i] = sc.cond[i][k];
    double i_xz = mutual_information(sc.prior, Channel(sc.classes, sc.grid, cond_rows));
    res.add_check("I_XZ_0.55", detail::near(i_xz, 0.55, 0.01), detail::fmt(i_xz));
    res.add_check("I_XY_0.47", detail::near(i_xy, 0.47, 0.01), detail::fmt(i_xy));

    Partition mer = min_error_partition(sc);
    res.add_check("min_error_boundary_57", mer.boundaries() == std::vector<int>{57},
                  detail::bounds_str(mer.boundaries()));
    res.finish();
    return res;
}

inline PresetResult preset_test_ex2() {
    TestScenario sc = TestScenario::gaussian({0.8, 0.2}, {30.0, 70.0}, {15.0, 10.0}, 3, 2);
    Partition init = Partition::from_boundaries(sc.grid_size(), {50, 60}, {0, 2, 1});
    PresetResult res = detail::run_test_preset("test-ex2", sc, init);
    const TestTrace& tr = std::get<TestTrace>(res.trace);

    res.add_check("boundaries_47_59",
                  tr.converged && tr.final_step().boundaries == std::vector<int>{47, 59},
                  detail::bounds_str(tr.final_step().boundaries));
    MatchedSemantics ms = right_step(sc, tr.final_step().partition);
    double i_xy = mutual_information(sc.prior, ms.channel);
    res.add_check("I_XY_0.52", detail::near(i_xy, 0.52, 0.01), detail::fmt(i_xy));

    PresetResult ex1 = preset_test_ex1();
    MatchedSemantics ms1 =
        right_step(TestScenario::gaussian({0.8, 0.2}, {30.0, 70.0}, {15.0, 10.0}, 2),
                   std::get<TestTrace>(ex1.trace).final_step().partition);
    double i_xy1 = mutual_information(Distribution(Alphabet::indexed(2), {0.8, 0.2}), ms1.channel);
    res.add_check("I_XY_greater_than_ex1", i_xy > i_xy1,
                  detail::fmt(i_xy) + " vs " + detail::fmt(i_xy1));
    res.finish();
    return res;
}

inline PresetResult preset_test_ex3(bool good_start) {
    TestScenario sc =
        TestScenario::gaussian({0.5, 0.35, 0.15}, {20.0, 50.0, 80.0}, {15.0, 10.0, 10.0}, 3);
    std::vector<int> start = good_start ? std::vector<int>{50, 60} : std::vector<int>{9, 20};
    Partition init = Partition::from_boundaries(sc.grid_size(), start, {0, 1, 2});
    PresetResult res =
        detail::run_test_preset(good_start ? "test-ex3-good" : "test-ex3-bad", sc, init);
    const TestTrace& tr = std::get<TestTrace>(res.trace);

    res.add_check("boundaries_35_66",
                  tr.converged && tr.final_step().boundaries == std::vector<int>{35, 66},
                  detail::bounds_str(tr.final_step().boundaries));
    if (good_start)
        res.add_check("iterations_le_5", tr.iterations <= 5, std::to_string(tr.iterations));
    else
        res.add_check("iterations_8_to_14", tr.iterations >= 8 && tr.iterations <= 14,
                      std::to_string(tr.iterations));
    res.finish();
    return res;
}

namespace detail {

struct MixPresetSpec {
    std::string name;
    std::vector<double> true_c, true_d, true_w;
    std::vector<double> init_c, init_d, init_w;
    double start_H = 0.0;
    bool exactly_five = false;  // "after exactly 5 right-steps" vs "after 5"
    std::vector<double> final_c, final_d, final_w;
    double c_tol = 0.0, d_tol = 0.0, w_tol = 0.0;
};

inline PresetResult run_mix_preset(const MixPresetSpec& spec) {
    PresetResult res;
    res.name = spec.name;
    Alphabet grid = Alphabet::range(1, 100);
    MixtureModel true_model = MixtureModel::make(grid, spec.true_c, spec.true_d, spec.true_w);
    MixtureModel init = MixtureModel::make(grid, spec.init_c, spec.init_d, spec.init_w);
    Distribution target = true_model.mixture_distribution();
    MixtureTrace trace = run_cm_mixture(target, init);

    double start_H = trace.steps.front().monitor.H_QP;
    double final_H = trace.final_step().monitor.H_QP;
    res.add_check("start_H_QP_" + fmt(spec.start_H), near(start_H, spec.start_H, 0.005),
                  fmt(start_H));
    if (spec.exactly_five)
        res.add_check("exactly_5_right_steps_to_tol",
                      trace.converged && trace.right_steps == 5 && final_H <= 0.001,
                      std::to_string(trace.right_steps) + " steps, H " + fmt(final_H));
    else
        res.add_check("within_5_right_steps_to_tol",
                      trace.converged && trace.right_steps <= 5 && final_H <= 0.001,
                      std::to_string(trace.right_steps) + " steps, H " + fmt(final_H));

    const MixtureModel& fin = trace.final_step().model;
    for (std::size_t j = 0; j < fin.size(); ++j) {
        bool ok = near(fin.components[j].center, spec.final_c[j], spec.c_tol) &&
                  near(fin.components[j].stddev, spec.final_d[j], spec.d_tol) &&
                  near(fin.py[j], spec.final_w[j], spec.w_tol);
        std::ostringstream got;
        got << '(' << fmt(fin.components[j].center) << ", " << fmt(fin.components[j].stddev)
            << ", " << fmt(fin.py[j]) << ") vs (" << spec.final_c[j] << ", " << spec.final_d[j]
            << ", " << spec.final_w[j] << ')';
        res.add_check("final_component_" + std::to_string(j + 1), ok, got.str());
    }

    bool mono = true;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < trace.steps.size(); ++k) {
        double jump = trace.steps[k + 1].monitor.H_QP - trace.steps[k].monitor.H_QP;
        worst = std::max(worst, jump);
        if (jump > 1e-9) mono = false;
    }
    res.add_check("H_QP_non_increasing", mono, "worst jump " + fmt(worst));

    std::ostringstream sum;
    sum << "preset = " << spec.name << "\n";
    sum << "converged = " << (trace.converged ? "true" : "false") << "\n";
    sum << "right_steps = " << trace.right_steps << "\n";
    sum << "start_H_QP_bits = " << fmt(start_H) << "\n";
    sum << "final_H_QP_bits = " << fmt(final_H) << "\n";
    for (std::size_t j = 0; j < fin.size(); ++j)
        sum << "component" << j + 1 << " = " << fmt(fin.components[j].center) << ", "
            << fmt(fin.components[j].stddev) << ", " << fmt(fin.py[j]) << "\n";
    res.summary = sum.str();
    res.trace = trace;
    res.finish();
    return res;
}

}  // namespace detail

inline PresetResult preset_mix_ex1() {
    detail::MixPresetSpec s;
    s.name = "mix-ex1";
    s.true_c = {35, 65}; s.true_d = {8, 12}; s.true_w = {0.7, 0.3};
    s.init_c = {30, 70}; s.init_d = {15, 10}; s.init_w = {0.5, 0.5};
    s.start_H = 0.410;
    s.exactly_five = true;
    s.final_c = {35.4, 66.2}; s.final_d = {8.3, 11.4}; s.final_w = {0.720, 0.280};
    s.c_tol = 0.3; s.d_tol = 0.3; s.w_tol = 0.01;
    return detail::run_mix_preset(s);
}

inline PresetResult preset_mix_ex2() {
    detail::MixPresetSpec s;
    s.name = "mix-ex2";
    s.true_c = {35, 65}; s.true_d = {8, 12}; s.true_w = {0.1, 0.9};
    s.init_c = {30, 70}; s.init_d = {8, 8}; s.init_w = {0.5, 0.5};
    s.start_H = 0.680;
    s.exactly_five = false;
    s.final_c = {38, 65.8}; s.final_d = {9.3, 11.5}; s.final_w = {0.134, 0.866};
    s.c_tol = 0.4; s.d_tol = 0.4; s.w_tol = 0.02;
    return detail::run_mix_preset(s);
}

inline std::optional<PresetResult> run_preset(const std::string& name) {
    if (name == "test-ex1") return preset_test_ex1();
    if (name == "test-ex2") return preset_test_ex2();
    if (name == "test-ex3-good") return preset_test_ex3(true);
    if (name == "test-ex3-bad") return preset_test_ex3(false);
    if (name == "mix-ex1") return preset_mix_ex1();
    if (name == "mix-ex2") return preset_mix_ex2();
    return std::nullopt;
}

}  // namespace cmatch
