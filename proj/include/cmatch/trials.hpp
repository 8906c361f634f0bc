#pragma once

// Seeded random-trial harness for the mixture algorithms: generates
// two-component scenarios, runs CM (optionally EM) on each, and reports
// convergence statistics. Every trial derives its own RNG stream from
// (seed, trial index), so results are independent of scheduling order.

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmatch/em.hpp"
#include "cmatch/mixture.hpp"

namespace cmatch {

// splitmix64; byte-stable across platforms, unlike the std distributions.
class TrialRng {
public:
    explicit TrialRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

struct TrialScenario {
    MixtureModel true_model;
    MixtureModel init_model;
};

// True components: centers uniform in [20,80] at least 10 apart, stddevs
// uniform in [5,15], first weight uniform in [0.1,0.9]. Every trial starts
// from a perturbed copy of the canonical wide guess (30, 70) with stddev 18
// and equal weights, the same shape the worked examples start from.
inline TrialScenario make_trial_scenario(std::uint64_t seed, std::uint64_t index,
                                         const Alphabet& grid) {
    TrialRng rng(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    double c1 = 0.0, c2 = 0.0;
    do {
        c1 = rng.uniform(20.0, 80.0);
        c2 = rng.uniform(20.0, 80.0);
    } while (std::abs(c1 - c2) < 10.0);
    if (c1 > c2) std::swap(c1, c2);
    double d1 = rng.uniform(5.0, 15.0);
    double d2 = rng.uniform(5.0, 15.0);
    double w1 = rng.uniform(0.1, 0.9);

    TrialScenario s;
    s.true_model = MixtureModel::make(grid, {c1, c2}, {d1, d2}, {w1, 1.0 - w1});
    s.init_model = MixtureModel::make(
        grid, {30.0 + rng.uniform(-2.0, 2.0), 70.0 + rng.uniform(-2.0, 2.0)},
        {18.0 + rng.uniform(-1.0, 1.0), 18.0 + rng.uniform(-1.0, 1.0)}, {0.5, 0.5});
    return s;
}

struct TrialResult {
    std::uint64_t index = 0;
    bool converged = false;
    std::size_t right_steps = 0;
    double final_H_QP = 0.0;
    double worst_violation = 0.0;  // max positive jump of H_QP across steps
    bool em_converged = false;
    std::size_t em_steps = 0;
};

struct TrialsOptions {
    std::size_t n_trials = 1000;
    std::uint64_t seed = 1;
    double tol = 0.001;
    std::size_t max_right_steps = 200;
    bool run_em = false;
    std::size_t workers = 0;  // 0 = hardware concurrency
    int grid_lo = 1;
    int grid_hi = 100;
};

struct TrialsReport {
    TrialsOptions options;
    std::vector<TrialResult> results;  // ordered by trial index
    int mode = 0;
    double median = 0.0;
    std::size_t max_steps = 0;
    std::size_t failures = 0;
    double worst_violation = 0.0;
    int em_mode = 0;
    double em_median = 0.0;
    std::size_t em_failures = 0;
};

inline TrialResult run_one_trial(std::uint64_t seed, std::uint64_t index,
                                 const Alphabet& grid, const TrialsOptions& opt) {
    TrialScenario sc = make_trial_scenario(seed, index, grid);
    Distribution target = sc.true_model.mixture_distribution();
    RunMixtureOptions ropt;
    ropt.tol = opt.tol;
    ropt.max_right_steps = opt.max_right_steps;
    TrialResult r;
    r.index = index;
    try {
        MixtureTrace trace = run_cm_mixture(target, sc.init_model, ropt);
        r.converged = trace.converged;
        r.right_steps = trace.right_steps;
        r.final_H_QP = trace.final_step().monitor.H_QP;
        for (std::size_t k = 0; k + 1 < trace.steps.size(); ++k) {
            double jump = trace.steps[k + 1].monitor.H_QP - trace.steps[k].monitor.H_QP;
            r.worst_violation = std::max(r.worst_violation, jump);
        }
        if (opt.run_em) {
            MixtureTrace em = run_em(target, sc.init_model, ropt);
            r.em_converged = em.converged;
            r.em_steps = em.right_steps;
        }
    } catch (const std::exception&) {
        r.converged = false;  // counted, not thrown
    }
    return r;
}

inline TrialsReport run_trials(const TrialsOptions& opt) {
    Alphabet grid = Alphabet::range(opt.grid_lo, opt.grid_hi);
    std::size_t workers = opt.workers ? opt.workers
                                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, static_cast<std::size_t>(16));

    TrialsReport rep;
    rep.options = opt;
    rep.results.resize(opt.n_trials);
    std::vector<std::future<void>> futs;
    for (std::size_t w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t i = w; i < opt.n_trials; i += workers)
                rep.results[i] = run_one_trial(opt.seed, i, grid, opt);
        }));
    }
    for (auto& f : futs) f.get();

    std::vector<std::size_t> counts, em_counts;
    for (const auto& r : rep.results) {
        rep.worst_violation = std::max(rep.worst_violation, r.worst_violation);
        if (r.converged) counts.push_back(r.right_steps); else ++rep.failures;
        if (opt.run_em) {
            if (r.em_converged) em_counts.push_back(r.em_steps); else ++rep.em_failures;
        }
    }
    auto summarize = [](std::vector<std::size_t>& v, int& mode, double& median,
                        std::size_t* maxv) {
        if (v.empty()) { mode = -1; median = -1.0; return; }
        std::sort(v.begin(), v.end());
        median = (v.size() % 2) ? static_cast<double>(v[v.size() / 2])
                                : 0.5 * static_cast<double>(v[v.size() / 2 - 1] + v[v.size() / 2]);
        std::map<std::size_t, std::size_t> hist;
        for (auto x : v) ++hist[x];
        std::size_t best = 0;
        for (const auto& [k, n] : hist)
            if (n > best) { best = n; mode = static_cast<int>(k); }
        if (maxv) *maxv = v.back();
    };
    summarize(counts, rep.mode, rep.median, &rep.max_steps);
    if (opt.run_em) summarize(em_counts, rep.em_mode, rep.em_median, nullptr);
    return rep;
}

inline std::string trials_report_text(const TrialsReport& rep) {
    std::ostringstream out;
    const auto& o = rep.options;
    out << "trials = " << o.n_trials << "\n";
    out << "seed = " << o.seed << "\n";
    out << "tol_bits = " << o.tol << "\n";
    out << "max_right_steps = " << o.max_right_steps << "\n";
    out << "cm_mode = " << rep.mode << "\n";
    out << "cm_median = " << rep.median << "\n";
    out << "cm_max = " << rep.max_steps << "\n";
    out << "cm_failures = " << rep.failures << "\n";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", rep.worst_violation);
    out << "worst_monotonicity_violation_bits = " << buf << "\n";
    if (o.run_em) {
        out << "em_mode = " << rep.em_mode << "\n";
        out << "em_median = " << rep.em_median << "\n";
        out << "em_failures = " << rep.em_failures << "\n";
    }
    std::map<std::size_t, std::size_t> hist;
    for (const auto& r : rep.results)
        if (r.converged) ++hist[r.right_steps];
    out << "histogram =";
    for (const auto& [k, n] : hist) out << ' ' << k << ':' << n;
    out << "\n";
    return out.str();
}

}  // namespace cmatch
