#pragma once

// CM algorithm for Gaussian mixture models on a discrete grid.
// Left-step a: responsibilities channel from the current model.
// Left-step b: mixing-weight fixed point.
// Right-step: component-parameter maximization of G at a fixed channel.
// The monitor tracks G, R, R_Q and H(Q||P) = R_Q - G = KL(P||Q), the
// functional whose per-step descent proves convergence.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmatch/prob.hpp"

namespace cmatch {

struct GaussianComponent {
    double center = 0.0;
    double stddev = 1.0;  // > 0
};

struct MixtureModel {
    Alphabet grid;
    std::vector<GaussianComponent> components;
    Distribution py;  // mixing weights over component labels

    static MixtureModel make(const Alphabet& grid, std::vector<double> centers,
                             std::vector<double> stddevs, std::vector<double> weights) {
        if (centers.size() != stddevs.size() || stddevs.size() != weights.size())
            throw std::invalid_argument("mixture model: parameter size mismatch");
        MixtureModel m;
        m.grid = grid;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (!(stddevs[j] > 0.0))
                throw std::invalid_argument("invalid-parameter: stddev must be > 0");
            m.components.push_back({centers[j], stddevs[j]});
        }
        Alphabet labels = Alphabet::indexed(weights.size());
        m.py = Distribution(std::move(labels), std::move(weights));
        return m;
    }

    std::size_t size() const { return components.size(); }

    std::vector<Distribution> component_distributions() const {
        std::vector<Distribution> out;
        out.reserve(components.size());
        for (const auto& c : components)
            out.push_back(discretized_gaussian(grid, c.center, c.stddev));
        return out;
    }

    // Q(X) = sum_j P(y_j) P(X|theta_j).
    Distribution mixture_distribution() const {
        auto comps = component_distributions();
        std::vector<double> q(grid.size(), 0.0);
        for (std::size_t j = 0; j < comps.size(); ++j)
            for (std::size_t k = 0; k < grid.size(); ++k) q[k] += py[j] * comps[j][k];
        return Distribution(grid, std::move(q));
    }
};

// Init hygiene: both centers on one side of the target mean tends to starve
// a component. A warning, not an error.
inline bool init_straddles_mean(const Distribution& target, const MixtureModel& init) {
    double mean = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) mean += target[k] * target.support()[k];
    bool below = false, above = false;
    for (const auto& c : init.components) {
        (c.center < mean ? below : above) = true;
    }
    return below && above;
}

struct LeftStepA {
    std::vector<std::vector<double>> channel;  // P(y_j|x_i), [j][i]
    Distribution q;                            // predicted mixture Q(X)
};

// P(y_j|x_i) = P(y_j) P(x_i|theta_j) / Q(x_i); columns over j sum to 1.
inline LeftStepA left_step_a(const Distribution& target, const MixtureModel& model) {
    auto comps = model.component_distributions();
    const std::size_t n = model.size();
    const std::size_t nk = model.grid.size();
    std::vector<double> q(nk, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < nk; ++k) q[k] += model.py[j] * comps[j][k];
    LeftStepA out;
    out.channel.assign(n, std::vector<double>(nk, 0.0));
    for (std::size_t k = 0; k < nk; ++k) {
        if (q[k] <= kProbFloor) {
            if (target[k] > kProbFloor)
                throw std::domain_error("undefined-responsibility: Q zero at a supported point");
            for (std::size_t j = 0; j < n; ++j) out.channel[j][k] = model.py[j];
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) out.channel[j][k] = model.py[j] * comps[j][k] / q[k];
    }
    out.q = Distribution(model.grid, std::move(q));
    return out;
}

struct LeftStepBOptions {
    double tol = 1e-9;
    std::size_t max_inner = 1000;
    // Collapse guard: active until one pass has converged without tripping.
    bool guard_active = true;
};

struct LeftStepB {
    Distribution py;
    bool guard_tripped = false;
    std::size_t inner_iterations = 0;
};

// Iterate P(y_j) <- sum_i P(x_i) P(y_j|x_i) to its fixed point. While the
// guard is active the loop aborts, keeping the pre-abort weights, as soon
// as any weight dips below 0.1/n.
inline LeftStepB left_step_b(const Distribution& target, const MixtureModel& model,
                             const LeftStepBOptions& opt = {}) {
    auto comps = model.component_distributions();
    const std::size_t n = model.size();
    const std::size_t nk = model.grid.size();
    std::vector<double> py = model.py.mass();
    const double floor = 0.1 / static_cast<double>(n);
    LeftStepB out;
    for (std::size_t it = 0; it < opt.max_inner; ++it) {
        std::vector<double> next(n, 0.0);
        for (std::size_t k = 0; k < nk; ++k) {
            if (target[k] <= kProbFloor) continue;
            double q = 0.0;
            for (std::size_t j = 0; j < n; ++j) q += py[j] * comps[j][k];
            if (q <= kProbFloor)
                throw std::domain_error("undefined-responsibility: Q zero at a supported point");
            for (std::size_t j = 0; j < n; ++j) next[j] += target[k] * py[j] * comps[j][k] / q;
        }
        out.inner_iterations = it + 1;
        if (opt.guard_active) {
            bool trip = false;
            for (double v : next)
                if (v < floor) trip = true;
            if (trip) {
                out.guard_tripped = true;
                break;
            }
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) delta = std::max(delta, std::abs(next[j] - py[j]));
        py = std::move(next);
        if (delta < opt.tol) break;
    }
    out.py = Distribution(model.py.support(), std::move(py));
    return out;
}

// Semantic mutual information evaluated at a fixed channel: the Right-step
// objective sum_ij target(x_i) P(y_j|x_i) log2( P(x_i|theta_j) / target(x_i) ).
inline double mixture_weighted_G(const Distribution& target,
                                 const std::vector<std::vector<double>>& channel,
                                 const std::vector<GaussianComponent>& components,
                                 const Alphabet& grid) {
    double g = 0.0;
    for (std::size_t j = 0; j < components.size(); ++j) {
        Distribution comp = discretized_gaussian(grid, components[j].center, components[j].stddev);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double w = target[k] * channel[j][k];
            if (w <= 0.0) continue;
            g += w * (slog2(comp[k]) - slog2(target[k]));
        }
    }
    return g;
}

struct RightStepOptions {
    double d_min = 0.5;  // grid units; keeps components off single-cell spikes
    std::size_t refine_rounds = 3;
    std::size_t golden_iterations = 48;
};

namespace detail {

// Weighted log-likelihood of one discretized component, in a single pass:
// sum_k w_k log2( exp(-u_k^2/2) / S ) = -quad/(2 ln2) - W log2 S.
inline double component_wll(const std::vector<double>& w, double w_total, const Alphabet& grid,
                            double c, double d) {
    double s = 0.0, quad = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double u = (grid[k] - c) / d;
        s += std::exp(-0.5 * u * u);
        if (w[k] > 0.0) quad += w[k] * u * u;
    }
    if (s <= 0.0) return -1e300;
    constexpr double inv_ln2 = 1.4426950408889634;
    return -0.5 * quad * inv_ln2 - w_total * std::log2(s);
}

template <typename F>
double golden_max(F f, double lo, double hi, std::size_t iters) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (std::size_t i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Maximize G over the component parameters with the channel held fixed.
// Per component: weighted-moment proposal, then axis-wise golden-section
// refinement of the discretized weighted log-likelihood. Never returns a
// worse component than the input, which keeps H(Q||P) non-increasing.
inline std::vector<GaussianComponent> right_step(
    const Distribution& target, const std::vector<std::vector<double>>& channel,
    const Alphabet& grid, const std::vector<GaussianComponent>& current,
    const RightStepOptions& opt = {}) {
    const std::size_t n = channel.size();
    if (current.size() != n)
        throw std::invalid_argument("right_step: component count mismatch");
    std::vector<GaussianComponent> out = current;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> w(grid.size());
        double total = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            w[k] = target[k] * channel[j][k];
            total += w[k];
        }
        if (total <= 1e-15)
            throw std::domain_error("component-starved: zero responsibility mass for component " +
                                    std::to_string(j));
        double c = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) c += w[k] * grid[k];
        c /= total;
        double var = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            var += w[k] * (grid[k] - c) * (grid[k] - c);
        double d = std::max(std::sqrt(var / total), opt.d_min);

        double base = detail::component_wll(w, total, grid, current[j].center,
                                            current[j].stddev);
        if (detail::component_wll(w, total, grid, c, d) < base) {
            c = current[j].center;
            d = current[j].stddev;
        }
        for (std::size_t round = 0; round < opt.refine_rounds; ++round) {
            double span = std::max(2.0 * d, 2.0);
            c = detail::golden_max(
                [&](double x) { return detail::component_wll(w, total, grid, x, d); },
                c - span, c + span, opt.golden_iterations);
            d = detail::golden_max(
                [&](double x) { return detail::component_wll(w, total, grid, c, x); },
                opt.d_min, std::max(3.0 * d, 6.0), opt.golden_iterations);
        }
        if (detail::component_wll(w, total, grid, c, d) >= base)
            out[j] = {c, std::max(d, opt.d_min)};
    }
    return out;
}

// Per-step convergence quantities for a self-consistent
// (model, channel) pair.
struct MixtureMonitor {
    double G = 0.0;
    double R = 0.0;
    double R_Q = 0.0;
    double H_QP = 0.0;       // = R_Q - G = KL(P||Q)
    double H_Y_Yplus = 0.0;  // KL of the responsibility marginal from P(Y)
    Distribution Q_X;
};

inline MixtureMonitor monitor(const Distribution& target, const MixtureModel& model) {
    LeftStepA a = left_step_a(target, model);
    const std::size_t n = model.size();
    const std::size_t nk = model.grid.size();
    auto comps = model.component_distributions();
    MixtureMonitor m;
    std::vector<double> py_plus(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < nk; ++k) {
            double w = target[k] * a.channel[j][k];
            if (w <= 0.0) continue;
            py_plus[j] += w;
            m.G += w * (slog2(comps[j][k]) - slog2(target[k]));
            m.R_Q += w * (slog2(a.channel[j][k]) - slog2(model.py[j]));
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (py_plus[j] > kProbFloor)
            m.H_Y_Yplus += py_plus[j] * (slog2(py_plus[j]) - slog2(model.py[j]));
    m.R = m.R_Q - m.H_Y_Yplus;
    m.H_QP = m.R_Q - m.G;
    m.Q_X = a.q;
    return m;
}

enum class MixtureStepKind { init, left_a, left_b, right, em };

inline const char* to_string(MixtureStepKind k) {
    switch (k) {
        case MixtureStepKind::init: return "init";
        case MixtureStepKind::left_a: return "left_a";
        case MixtureStepKind::left_b: return "left_b";
        case MixtureStepKind::right: return "right";
        case MixtureStepKind::em: return "em";
    }
    return "?";
}

struct MixtureTraceStep {
    MixtureStepKind kind = MixtureStepKind::init;
    MixtureMonitor monitor;
    MixtureModel model;
};

struct MixtureTrace {
    std::vector<MixtureTraceStep> steps;
    bool converged = false;
    std::size_t right_steps = 0;
    const MixtureTraceStep& final_step() const { return steps.back(); }
};

struct RunMixtureOptions {
    double tol = 0.001;  // bits of H(Q||P)
    std::size_t max_right_steps = 200;
    LeftStepBOptions left_b = {};
    RightStepOptions right = {};
};

// loop { left_a (record); left_b (record); stop if H_QP <= tol; right
// (record) }. The first recorded step carries the starting H(Q||P).
inline MixtureTrace run_cm_mixture(const Distribution& target, const MixtureModel& init,
                                   const RunMixtureOptions& opt = {}) {
    MixtureTrace trace;
    MixtureModel model = init;
    bool guard_active = true;
    while (true) {
        trace.steps.push_back({MixtureStepKind::left_a, monitor(target, model), model});

        LeftStepBOptions bopt = opt.left_b;
        bopt.guard_active = guard_active;
        LeftStepB b = left_step_b(target, model, bopt);
        if (!b.guard_tripped) guard_active = false;
        model.py = b.py;
        MixtureMonitor mb = monitor(target, model);
        trace.steps.push_back({MixtureStepKind::left_b, mb, model});
        if (mb.H_QP <= opt.tol) {
            trace.converged = true;
            return trace;
        }
        if (trace.right_steps >= opt.max_right_steps) return trace;  // non-convergent

        LeftStepA ab = left_step_a(target, model);  // channel for the fixed-weight step
        model.components = right_step(target, ab.channel, model.grid, model.components, opt.right);
        ++trace.right_steps;
        trace.steps.push_back({MixtureStepKind::right, monitor(target, model), model});
    }
}

// Convenience overload: the target is the mixture distribution of a known
// true model.
inline MixtureTrace run_cm_mixture(const MixtureModel& true_model, const MixtureModel& init,
                                   const RunMixtureOptions& opt = {}) {
    return run_cm_mixture(true_model.mixture_distribution(), init, opt);
}

// Fuzzy decision rule P(y_j|x) with the likelihoods raised to s.
// Crisp mode picks argmax_j P(x|theta_j), larger P(y_j) then lower index on
// ties.
inline std::vector<std::vector<double>> decision_rule(const MixtureModel& model, double s,
                                                      bool crisp = false,
                                                      bool* underflow_flag = nullptr) {
    if (std::isinf(s) && s > 0) crisp = true;  // +inf sentinel
    auto comps = model.component_distributions();
    const std::size_t n = model.size();
    const std::size_t nk = model.grid.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(nk, 0.0));
    if (underflow_flag) *underflow_flag = false;
    for (std::size_t k = 0; k < nk; ++k) {
        if (crisp) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < n; ++j) {
                if (comps[j][k] > comps[best][k] ||
                    (comps[j][k] == comps[best][k] && model.py[j] > model.py[best]))
                    best = j;
            }
            out[best][k] = 1.0;
            continue;
        }
        double maxlog = -1e300;
        for (std::size_t j = 0; j < n; ++j)
            maxlog = std::max(maxlog, s * slog2(comps[j][k]));
        double sum = 0.0;
        std::vector<double> term(n);
        for (std::size_t j = 0; j < n; ++j) {
            term[j] = model.py[j] * std::exp2(s * slog2(comps[j][k]) - maxlog);
            sum += term[j];
        }
        if (sum <= 0.0) {
            if (underflow_flag) *underflow_flag = true;
            for (std::size_t j = 0; j < n; ++j) out[j][k] = 1.0 / static_cast<double>(n);
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) out[j][k] = term[j] / sum;
    }
    return out;
}

}  // namespace cmatch
