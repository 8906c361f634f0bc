#pragma once

// Standard EM on the same discretized mixture setup, for head-to-head
// comparison with the CM algorithm. The E-step is literally Left-step a;
// the M-step updates the weights and the component moments together.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmatch/mixture.hpp"
#include "cmatch/prob.hpp"

namespace cmatch {

// Per-unit-N objectives of the classical EM decomposition
// log P(X^N|Theta)/N >= L = Q - H (all bits).
struct EMObjectives {
    double logL = 0.0;  // sum target log2 Q
    double Qfun = 0.0;  // sum_ij target r_ij log2( P(y_j) P(x_i|theta_j) )
    double Hfun = 0.0;  // conditional entropy term, stored positive
    double Lfun = 0.0;  // Qfun + Hfun
    double H_Y_gen = 0.0;  // -sum_j py+1(y_j) log2 P(y_j), generalized entropy
};

inline EMObjectives em_objectives(const Distribution& target, const MixtureModel& model) {
    LeftStepA a = left_step_a(target, model);
    auto comps = model.component_distributions();
    EMObjectives o;
    const std::size_t n = model.size();
    for (std::size_t k = 0; k < target.size(); ++k) {
        if (target[k] <= kProbFloor) continue;
        o.logL += target[k] * slog2(a.q[k]);
        for (std::size_t j = 0; j < n; ++j) {
            double w = target[k] * a.channel[j][k];
            if (w <= 0.0) continue;
            o.Qfun += w * (slog2(model.py[j]) + slog2(comps[j][k]));
            o.Hfun -= w * slog2(a.channel[j][k]);
        }
    }
    o.Lfun = o.Qfun + o.Hfun;
    std::vector<double> py_plus(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < target.size(); ++k) py_plus[j] += target[k] * a.channel[j][k];
    for (std::size_t j = 0; j < n; ++j)
        if (py_plus[j] > kProbFloor) o.H_Y_gen -= py_plus[j] * slog2(model.py[j]);
    return o;
}

struct EMStepOptions {
    RightStepOptions right = {};
};

// One EM iteration: E-step responsibilities (identical to Left-step a),
// then the M-step weight marginal and component update.
inline MixtureModel em_step(const Distribution& target, const MixtureModel& model,
                            const EMStepOptions& opt = {}) {
    LeftStepA a = left_step_a(target, model);
    const std::size_t n = model.size();
    std::vector<double> py(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < target.size(); ++k) py[j] += target[k] * a.channel[j][k];
    MixtureModel next = model;
    next.components = right_step(target, a.channel, model.grid, model.components, opt.right);
    next.py = Distribution(model.py.support(), std::move(py));
    return next;
}

// Run EM until H(Q||P) <= tol, recording the monitor once per step.
inline MixtureTrace run_em(const Distribution& target, const MixtureModel& init,
                           const RunMixtureOptions& opt = {}) {
    MixtureTrace trace;
    MixtureModel model = init;
    trace.steps.push_back({MixtureStepKind::init, monitor(target, model), model});
    while (true) {
        if (trace.steps.back().monitor.H_QP <= opt.tol) {
            trace.converged = true;
            return trace;
        }
        if (trace.right_steps >= opt.max_right_steps) return trace;
        EMStepOptions sopt;
        sopt.right = opt.right;
        model = em_step(target, model, sopt);
        ++trace.right_steps;
        trace.steps.push_back({MixtureStepKind::em, monitor(target, model), model});
    }
}

inline MixtureTrace run_em(const MixtureModel& true_model, const MixtureModel& init,
                           const RunMixtureOptions& opt = {}) {
    return run_em(true_model.mixture_distribution(), init, opt);
}

}  // namespace cmatch
