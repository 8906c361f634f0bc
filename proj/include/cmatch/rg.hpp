#pragma once

// Parametric R(G) solver: the minimum Shannon mutual information R needed
// to guarantee semantic mutual information G, plus the classical R(D) as a
// degenerate mode and the binary-source closed form.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmatch/prob.hpp"
#include "cmatch/semantic.hpp"

namespace cmatch {

// Information payoff I_ij in bits per (x_i, y_j); negated distortions in
// the R(D) mode. Saturated values from the semantic module are allowed.
class PayoffMatrix {
public:
    PayoffMatrix() = default;

    PayoffMatrix(std::size_t n_inputs, std::size_t n_outputs, double fill = 0.0)
        : bits_(n_inputs, std::vector<double>(n_outputs, fill)) {}

    explicit PayoffMatrix(std::vector<std::vector<double>> bits) : bits_(std::move(bits)) {
        if (bits_.empty() || bits_[0].empty())
            throw std::invalid_argument("payoff: empty matrix");
        for (const auto& r : bits_) {
            if (r.size() != bits_[0].size())
                throw std::invalid_argument("payoff: ragged matrix");
            for (double v : r)
                if (!std::isfinite(v))
                    throw std::invalid_argument("payoff: non-finite entry");
        }
    }

    // Binary symmetric payoff: b on the diagonal, a off it.
    static PayoffMatrix binary_symmetric(double b, double a) {
        return PayoffMatrix({{b, a}, {a, b}});
    }

    // I_ij = log2( T(theta_j|x_i) / T(theta_j) ) from a semantic channel.
    static PayoffMatrix from_semantic(const Distribution& prior, const SemanticChannel& sem) {
        PayoffMatrix m(prior.size(), sem.size());
        for (std::size_t j = 0; j < sem.size(); ++j)
            for (std::size_t i = 0; i < prior.size(); ++i)
                m.bits_[i][j] = semantic_info_point(prior, sem[j], i);
        return m;
    }

    std::size_t n_inputs() const { return bits_.size(); }
    std::size_t n_outputs() const { return bits_[0].size(); }
    double operator()(std::size_t i, std::size_t j) const { return bits_[i][j]; }
    double& at(std::size_t i, std::size_t j) { return bits_[i][j]; }

private:
    std::vector<std::vector<double>> bits_;  // [i][j]
};

struct RGPoint {
    double s = 0.0;
    double G = 0.0;  // bits
    double R = 0.0;  // bits
    std::vector<double> py;
    std::vector<double> lambdas;  // partition function per x_i
    std::size_t iterations = 0;
};

struct RGSolverOptions {
    double py_tol = 1e-12;
    std::size_t max_iterations = 100000;
};

// One point of the parametric solution: alternate the channel
// P(y_j|x_i) = P(y_j) 2^{s I_ij} / lambda_i with the marginal update
// P(y_j) <- sum_i P(x_i) P(y_j|x_i) until P(Y) is stationary.
inline RGPoint rg_point(const Distribution& prior, const PayoffMatrix& payoff, double s,
                        const Distribution& py_init, const RGSolverOptions& opt = {}) {
    const std::size_t ni = prior.size();
    const std::size_t nj = payoff.n_outputs();
    if (payoff.n_inputs() != ni)
        throw std::invalid_argument("rg_point: payoff/prior size mismatch");
    if (py_init.size() != nj)
        throw std::invalid_argument("rg_point: py_init size mismatch");
    for (std::size_t j = 0; j < nj; ++j)
        if (py_init[j] <= 0.0)
            throw std::invalid_argument("rg_point: py_init must be strictly positive");

    std::vector<std::vector<double>> w(ni, std::vector<double>(nj));  // 2^{s I_ij}
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < nj; ++j) w[i][j] = std::exp2(s * payoff(i, j));

    std::vector<double> py = py_init.mass();
    std::vector<double> lam(ni);
    std::size_t it = 0;
    double delta = 0.0;
    for (; it < opt.max_iterations; ++it) {
        for (std::size_t i = 0; i < ni; ++i) {
            double l = 0.0;
            for (std::size_t j = 0; j < nj; ++j) l += py[j] * w[i][j];
            lam[i] = l;
        }
        std::vector<double> next(nj, 0.0);
        for (std::size_t j = 0; j < nj; ++j) {
            double q = 0.0;
            for (std::size_t i = 0; i < ni; ++i) q += prior[i] * py[j] * w[i][j] / lam[i];
            next[j] = q;
        }
        delta = 0.0;
        for (std::size_t j = 0; j < nj; ++j) delta = std::max(delta, std::abs(next[j] - py[j]));
        py = std::move(next);
        if (delta < opt.py_tol) break;
    }
    if (it == opt.max_iterations)
        throw std::runtime_error("convergence-failure: rg_point residual " + std::to_string(delta));

    for (std::size_t i = 0; i < ni; ++i) {
        double l = 0.0;
        for (std::size_t j = 0; j < nj; ++j) l += py[j] * w[i][j];
        lam[i] = l;
    }
    RGPoint out;
    out.s = s;
    out.py = py;
    out.lambdas = lam;
    out.iterations = it + 1;
    double g = 0.0;
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < nj; ++j)
            g += payoff(i, j) * prior[i] * py[j] * w[i][j] / lam[i];
    out.G = g;
    double r = s * g;
    for (std::size_t i = 0; i < ni; ++i) r -= prior[i] * std::log2(lam[i]);
    if (r < 0.0 && r > -1e-12) r = 0.0;  // numeric dust at s = 0
    out.R = r;
    return out;
}

inline double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

// Closed form for a binary source with symmetric payoff (b diagonal, a off):
// R = H(X) - H2( (h - G1) / (2h) ) with h=(b-a)/2, c=(a+b)/2, G1=G-c.
inline double rg_binary_closed_form(double G, double a, double b, const Distribution& prior) {
    if (prior.size() != 2)
        throw std::invalid_argument("rg_binary_closed_form: prior must be binary");
    if (!(a < G && G < b))
        throw std::domain_error("rg_binary_closed_form: G outside (a,b)");
    double h = 0.5 * (b - a);
    double c = 0.5 * (a + b);
    double g1 = G - c;
    return entropy(prior) - binary_entropy((h - g1) / (2.0 * h));
}

struct RDPoint {
    double s = 0.0;
    double D = 0.0;
    double R = 0.0;
    std::vector<double> py;
};

// Classical parametric R(D): the same alternation with payoff -d_ij and
// s <= 0 (exp(s d_ij) weighting).
inline RDPoint rd_point(const Distribution& prior, const std::vector<std::vector<double>>& distortion,
                        double s, const Distribution& py_init, const RGSolverOptions& opt = {}) {
    if (s > 0.0)
        throw std::invalid_argument("rd_point: s must be <= 0");
    const std::size_t ni = prior.size();
    if (distortion.size() != ni)
        throw std::invalid_argument("rd_point: distortion rows != prior size");
    PayoffMatrix neg(ni, distortion[0].size());
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < distortion[i].size(); ++j) {
            if (distortion[i][j] < 0.0)
                throw std::invalid_argument("rd_point: negative distortion");
            neg.at(i, j) = -distortion[i][j];
        }
    // 2^{s' (-d)} = exp(s d) at s' = -s/ln2, so the weighting is exactly
    // the classical exp(s d_ij).
    RGPoint p = rg_point(prior, neg, -s / std::log(2.0), py_init, opt);
    RDPoint out;
    out.s = s;
    out.D = -p.G;
    out.R = p.R;
    out.py = p.py;
    return out;
}

// r = G / R.
inline double information_efficiency(double G, double R) {
    if (R == 0.0)
        throw std::domain_error("undefined-efficiency: R is zero");
    return G / R;
}

struct RGCurve {
    std::vector<RGPoint> points;  // ordered by s
};

inline RGCurve rg_curve(const Distribution& prior, const PayoffMatrix& payoff,
                        const std::vector<double>& s_values, const Distribution& py_init,
                        const RGSolverOptions& opt = {}) {
    RGCurve c;
    c.points.reserve(s_values.size());
    for (double s : s_values) c.points.push_back(rg_point(prior, payoff, s, py_init, opt));
    return c;
}

struct GExtremes {
    double g_plus = 0.0;   // G at the s>0 branch with R(s) = target
    double g_minus = 0.0;  // G at the s<0 branch
    double s_plus = 0.0;
    double s_minus = 0.0;
};

// For a target R, bisect s on each branch; R grows with |s| away from 0.
inline GExtremes g_extremes(const Distribution& prior, const PayoffMatrix& payoff,
                            double target_R, const Distribution& py_init,
                            double r_tol = 1e-6, const RGSolverOptions& opt = {}) {
    if (target_R <= 0.0)
        throw std::invalid_argument("g_extremes: target R must be positive");
    auto solve_branch = [&](double sign) {
        double hi = sign;
        RGPoint p = rg_point(prior, payoff, hi, py_init, opt);
        std::size_t guard = 0;
        while (p.R < target_R) {
            hi *= 2.0;
            if (++guard > 60)
                throw std::domain_error("g_extremes: target R not reachable on branch");
            p = rg_point(prior, payoff, hi, py_init, opt);
        }
        double lo = 0.0;
        for (int k = 0; k < 200; ++k) {
            double mid = 0.5 * (lo + hi);
            p = rg_point(prior, payoff, mid, py_init, opt);
            if (std::abs(p.R - target_R) <= r_tol) break;
            if (p.R < target_R) lo = mid; else hi = mid;
        }
        return p;
    };
    GExtremes out;
    RGPoint plus = solve_branch(+1.0);
    RGPoint minus = solve_branch(-1.0);
    out.g_plus = plus.G;
    out.s_plus = plus.s;
    out.g_minus = minus.G;
    out.s_minus = minus.s;
    return out;
}

}  // namespace cmatch
