// Experiment runner: named presets for the worked examples, config-driven
// scenarios, random-trial statistics and trace export.
//
// Exit codes: 0 = ran and all embedded checks passed, 1 = ran but checks
// failed, 2 = usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cmatch/config.hpp"
#include "cmatch/em.hpp"
#include "cmatch/mixture.hpp"
#include "cmatch/presets.hpp"
#include "cmatch/rg.hpp"
#include "cmatch/test_cm.hpp"
#include "cmatch/trace_io.hpp"
#include "cmatch/trials.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir);
}

void write_trace(const cmatch::PresetResult& res, const CommonArgs& args) {
    const std::string base = args.out_dir + "/" + res.name;
    if (std::holds_alternative<cmatch::TestTrace>(res.trace)) {
        const auto& tr = std::get<cmatch::TestTrace>(res.trace);
        if (args.format == "json")
            cmatch::write_file(base + "_trace.json", cmatch::test_trace_json(tr).dump(2) + "\n");
        else
            cmatch::write_file(base + "_trace.csv", cmatch::test_trace_csv(tr));
    } else if (std::holds_alternative<cmatch::MixtureTrace>(res.trace)) {
        const auto& tr = std::get<cmatch::MixtureTrace>(res.trace);
        if (args.format == "json")
            cmatch::write_file(base + "_trace.json",
                               cmatch::mixture_trace_json(tr).dump(2) + "\n");
        else
            cmatch::write_file(base + "_trace.csv", cmatch::mixture_trace_csv(tr));
    }
    cmatch::write_file(base + "_summary.txt", res.summary);
}

int cmd_preset(const std::string& name, const CommonArgs& args) {
    std::optional<cmatch::PresetResult> res = cmatch::run_preset(name);
    if (!res) {
        std::cerr << "unknown preset '" << name << "'; available:";
        for (const auto& n : cmatch::preset_names()) std::cerr << ' ' << n;
        std::cerr << "\n";
        return 2;
    }
    ensure_out_dir(args.out_dir);
    write_trace(*res, args);
    std::cout << res->summary;
    for (const auto& c : res->checks)
        std::cout << "check " << (c.passed ? "PASS" : "FAIL") << " " << c.name << " (" << c.detail
                  << ")\n";
    std::cout << (res->passed ? "preset PASS" : "preset FAIL") << "\n";
    return res->passed ? 0 : 1;
}

cmatch::TestScenario scenario_from_config(const cmatch::ExperimentConfig& cfg) {
    return cmatch::TestScenario::gaussian(cfg.priors, cfg.centers, cfg.stddevs,
                                          cfg.neutral_label ? cfg.priors.size() + 1
                                                            : cfg.priors.size(),
                                          cfg.neutral_label, cfg.grid_lo, cfg.grid_hi);
}

int cmd_run(const std::string& config_path, const CommonArgs& args) {
    cmatch::ExperimentConfig cfg = cmatch::parse_config(slurp(config_path));
    if (args.tol) cfg.tol = *args.tol;
    if (args.seed) cfg.seed = *args.seed;
    ensure_out_dir(args.out_dir);
    const std::string base = args.out_dir + "/" + cmatch::to_string(cfg.kind);

    if (cfg.kind == cmatch::ExperimentKind::test ||
        cfg.kind == cmatch::ExperimentKind::estimation) {
        if (cfg.neutral_label && cfg.priors.size() != 2) {
            std::cerr << "config: a neutral label needs exactly two classes\n";
            return 2;
        }
        cmatch::TestScenario sc = scenario_from_config(cfg);
        std::vector<int> order;
        if (cfg.neutral_label) {
            // grid order: class 0 region, neutral in the middle, class 1 region
            order = {0, static_cast<int>(*cfg.neutral_label), 1};
        } else {
            for (std::size_t i = 0; i <= cfg.init_boundaries.size(); ++i)
                order.push_back(static_cast<int>(i));
        }
        if (order.size() != cfg.init_boundaries.size() + 1 ||
            (!cfg.neutral_label && order.size() != cfg.priors.size())) {
            std::cerr << "config: init boundaries do not match the number of hypotheses\n";
            return 2;
        }
        cmatch::Partition init =
            cmatch::Partition::from_boundaries(sc.grid_size(), cfg.init_boundaries, order);
        cmatch::RunTestOptions opt;
        opt.max_iterations = cfg.max_iterations;
        cmatch::TestTrace tr = cmatch::run_cm_test(sc, init, opt);
        if (args.format == "json")
            cmatch::write_file(base + "_trace.json", cmatch::test_trace_json(tr).dump(2) + "\n");
        else
            cmatch::write_file(base + "_trace.csv", cmatch::test_trace_csv(tr));
        std::ostringstream sum;
        sum << "kind = " << cmatch::to_string(cfg.kind) << "\n";
        sum << "converged = " << (tr.converged ? "true" : "false") << "\n";
        sum << "iterations = " << tr.iterations << "\n";
        sum << "boundaries =";
        for (int b : tr.final_step().boundaries) sum << ' ' << b;
        sum << "\n";
        sum << "I_XTheta_bits = " << cmatch::format_g9(tr.final_step().info_bits) << "\n";
        cmatch::write_file(base + "_summary.txt", sum.str());
        std::cout << sum.str();
        return 0;
    }
    if (cfg.kind == cmatch::ExperimentKind::mixture || cfg.kind == cmatch::ExperimentKind::em) {
        cmatch::Alphabet grid = cmatch::Alphabet::range(cfg.grid_lo, cfg.grid_hi);
        cmatch::MixtureModel true_model =
            cmatch::MixtureModel::make(grid, cfg.true_centers, cfg.true_stddevs, cfg.true_weights);
        cmatch::MixtureModel init =
            cmatch::MixtureModel::make(grid, cfg.init_centers, cfg.init_stddevs, cfg.init_weights);
        cmatch::Distribution target = true_model.mixture_distribution();
        if (!cmatch::init_straddles_mean(target, init))
            std::cerr << "warning: all init centers on one side of the target mean\n";
        cmatch::RunMixtureOptions opt;
        opt.tol = cfg.tol;
        opt.max_right_steps = cfg.max_right_steps;
        cmatch::MixtureTrace tr = cfg.kind == cmatch::ExperimentKind::mixture
                                      ? cmatch::run_cm_mixture(target, init, opt)
                                      : cmatch::run_em(target, init, opt);
        if (args.format == "json")
            cmatch::write_file(base + "_trace.json",
                               cmatch::mixture_trace_json(tr).dump(2) + "\n");
        else
            cmatch::write_file(base + "_trace.csv", cmatch::mixture_trace_csv(tr));
        std::ostringstream sum;
        sum << "kind = " << cmatch::to_string(cfg.kind) << "\n";
        sum << "converged = " << (tr.converged ? "true" : "false") << "\n";
        sum << "right_steps = " << tr.right_steps << "\n";
        sum << "final_H_QP_bits = " << cmatch::format_g9(tr.final_step().monitor.H_QP) << "\n";
        const auto& fin = tr.final_step().model;
        for (std::size_t j = 0; j < fin.size(); ++j)
            sum << "component" << j + 1 << " = " << cmatch::format_g9(fin.components[j].center)
                << ", " << cmatch::format_g9(fin.components[j].stddev) << ", "
                << cmatch::format_g9(fin.py[j]) << "\n";
        cmatch::write_file(base + "_summary.txt", sum.str());
        std::cout << sum.str();
        return 0;
    }
    std::cerr << "config kind '" << cmatch::to_string(cfg.kind)
              << "' is not runnable with 'run'; use the matching subcommand\n";
    return 2;
}

int cmd_trials(const std::string& config_path, const CommonArgs& args) {
    cmatch::ExperimentConfig cfg = cmatch::parse_config(slurp(config_path));
    if (cfg.kind != cmatch::ExperimentKind::trials) {
        std::cerr << "config kind must be 'trials'\n";
        return 2;
    }
    if (args.tol) cfg.tol = *args.tol;
    if (args.seed) cfg.seed = *args.seed;
    ensure_out_dir(args.out_dir);
    cmatch::TrialsOptions opt;
    opt.n_trials = cfg.n_trials;
    opt.seed = cfg.seed;
    opt.tol = cfg.tol;
    opt.max_right_steps = cfg.max_right_steps;
    opt.run_em = cfg.run_em_too;
    opt.grid_lo = cfg.grid_lo;
    opt.grid_hi = cfg.grid_hi;
    cmatch::TrialsReport rep = cmatch::run_trials(opt);
    std::string text = cmatch::trials_report_text(rep);
    cmatch::write_file(args.out_dir + "/trials_report.txt", text);
    std::cout << text;
    return 0;
}

int cmd_rg(const std::string& config_path, const CommonArgs& args) {
    cmatch::ExperimentConfig cfg = cmatch::parse_config(slurp(config_path));
    if (cfg.kind != cmatch::ExperimentKind::rg_curve) {
        std::cerr << "config kind must be 'rg_curve'\n";
        return 2;
    }
    ensure_out_dir(args.out_dir);
    if (cfg.priors.empty()) cfg.priors = {0.5, 0.5};
    cmatch::Distribution prior(cmatch::Alphabet::indexed(cfg.priors.size()), cfg.priors);
    cmatch::PayoffMatrix payoff = cmatch::PayoffMatrix::binary_symmetric(cfg.payoff_b, cfg.payoff_a);
    std::vector<double> svals;
    for (std::size_t i = 0; i < cfg.s_count; ++i)
        svals.push_back(cfg.s_min +
                        (cfg.s_max - cfg.s_min) * static_cast<double>(i) /
                            static_cast<double>(cfg.s_count - 1));
    cmatch::RGCurve curve =
        cmatch::rg_curve(prior, payoff, svals, cmatch::Distribution::uniform(prior.support()));
    if (args.format == "json")
        cmatch::write_file(args.out_dir + "/rg_curve.json",
                           cmatch::rg_curve_json(curve).dump(2) + "\n");
    else
        cmatch::write_file(args.out_dir + "/rg_curve.csv", cmatch::rg_curve_csv(curve));
    std::cout << "points = " << curve.points.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channels' matching experiments"};
    app.require_subcommand(1);
    CommonArgs args;
    auto add_common = [&args](CLI::App* sub) {
        sub->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--tol", args.tol, "Convergence tolerance in bits");
        sub->add_option("--seed", args.seed, "Random seed override");
        sub->add_option("--format", args.format, "Trace format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    std::string preset_name, config_path;
    CLI::App* preset = app.add_subcommand("preset", "Run a named example preset");
    preset->add_option("name", preset_name, "Preset name")->required();
    add_common(preset);
    CLI::App* runcmd = app.add_subcommand("run", "Run a scenario from a config file");
    runcmd->add_option("config", config_path, "Config path")->required();
    add_common(runcmd);
    CLI::App* trials = app.add_subcommand("trials", "Random-trial statistics from a config file");
    trials->add_option("config", config_path, "Config path")->required();
    add_common(trials);
    CLI::App* rg = app.add_subcommand("rg", "R(G) curve sweep from a config file");
    rg->add_option("config", config_path, "Config path")->required();
    add_common(rg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (preset->parsed()) return cmd_preset(preset_name, args);
        if (runcmd->parsed()) return cmd_run(config_path, args);
        if (trials->parsed()) return cmd_trials(config_path, args);
        if (rg->parsed()) return cmd_rg(config_path, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
