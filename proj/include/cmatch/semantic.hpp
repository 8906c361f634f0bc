#pragma once

// Truth functions, semantic Bayesian inference, logical probability,
// semantic information measures and the optimization of semantic channels.
//
// A truth function T(theta_j|X) in [0,1] encodes what message y_j means;
// its prior-weighted average T(theta_j) is the logical probability of y_j.
// Semantic Bayes turns (prior, truth function) into a likelihood.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmatch/prob.hpp"

namespace cmatch {

// One truth function over X. Values live in [0,1]; rows are not normalized.
class TruthRow {
public:
    TruthRow() = default;

    TruthRow(Alphabet support, std::vector<double> values)
        : support_(std::move(support)), values_(std::move(values)) {
        if (values_.size() != support_.size())
            throw std::invalid_argument("truth row: size mismatch");
        for (double v : values_)
            if (!(v >= 0.0) || v > 1.0 + kSumTol)
                throw std::invalid_argument("truth row: value outside [0,1]");
    }

    static TruthRow tautology(Alphabet support) {
        std::vector<double> v(support.size(), 1.0);
        return TruthRow(std::move(support), std::move(v));
    }

    // Gaussian truth function exp(-(x-center)^2/(2 stddev^2)); peaks at 1 by
    // construction, never renormalized.
    static TruthRow gaussian(const Alphabet& support, double center, double stddev) {
        if (!(stddev > 0.0))
            throw std::invalid_argument("invalid-parameter: stddev must be > 0");
        std::vector<double> v(support.size());
        for (std::size_t i = 0; i < support.size(); ++i) {
            double u = (support[i] - center) / stddev;
            v[i] = std::exp(-0.5 * u * u);
        }
        return TruthRow(support, std::move(v));
    }

    const Alphabet& support() const { return support_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    double max_value() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, v);
        return m;
    }

private:
    Alphabet support_;
    std::vector<double> values_;
};

// One truth row per hypothesis; rows are independent of each other.
struct SemanticChannel {
    std::vector<TruthRow> rows;

    std::size_t size() const { return rows.size(); }
    const TruthRow& operator[](std::size_t j) const { return rows[j]; }
};

// Counts N_ij of symbol x_i observed under hypothesis y_j.
class SampleCounts {
public:
    SampleCounts(std::size_t n_symbols, std::size_t n_hypotheses)
        : counts_(n_hypotheses, std::vector<std::int64_t>(n_symbols, 0)) {}

    void set(std::size_t j, std::size_t i, std::int64_t n) {
        if (n < 0) throw std::invalid_argument("sample counts: negative count");
        counts_[j][i] = n;
    }
    std::int64_t operator()(std::size_t j, std::size_t i) const { return counts_[j][i]; }
    std::size_t n_hypotheses() const { return counts_.size(); }
    std::size_t n_symbols() const { return counts_.empty() ? 0 : counts_[0].size(); }

    std::int64_t total_for(std::size_t j) const {
        std::int64_t t = 0;
        for (auto n : counts_[j]) t += n;
        return t;
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (std::size_t j = 0; j < counts_.size(); ++j) t += total_for(j);
        return t;
    }

private:
    std::vector<std::vector<std::int64_t>> counts_;  // [j][i]
};

struct SemanticBayesResult {
    Distribution likelihood;  // P(X|theta_j)
    double logical_prob = 0.0;  // T(theta_j)
};

// P(X|theta_j) = P(X) T(theta_j|X) / T(theta_j),  T(theta_j) = sum P(x) T(x).
inline SemanticBayesResult semantic_bayes(const Distribution& prior, const TruthRow& truth) {
    if (prior.support() != truth.support())
        throw std::invalid_argument("semantic_bayes: support mismatch");
    double t = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) t += prior[i] * truth[i];
    if (t <= kProbFloor)
        throw std::domain_error("empty-fuzzy-set: logical probability is zero");
    std::vector<double> lik(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) lik[i] = prior[i] * truth[i] / t;
    return {Distribution(prior.support(), std::move(lik)), t};
}

// I(x_i; theta_j) = log2( T(theta_j|x_i) / T(theta_j) ); saturates at
// kNegInfoBits when the truth value is zero (one counterexample).
inline double semantic_info_point(const Distribution& prior, const TruthRow& truth,
                                  std::size_t i) {
    if (prior.support() != truth.support())
        throw std::invalid_argument("semantic_info_point: support mismatch");
    double t = 0.0;
    for (std::size_t k = 0; k < prior.size(); ++k) t += prior[k] * truth[k];
    if (t <= kProbFloor)
        throw std::domain_error("empty-fuzzy-set: logical probability is zero");
    if (truth[i] <= kProbFloor) return kNegInfoBits;
    return std::log2(truth[i] / t);
}

// Generalized KL information: average of I(x;theta_j) under a sampling
// distribution P(X|y_j).
inline double semantic_kl_info(const Distribution& sampling, const Distribution& prior,
                               const TruthRow& truth) {
    if (sampling.support() != prior.support() || prior.support() != truth.support())
        throw std::invalid_argument("semantic_kl_info: support mismatch");
    double t = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) t += prior[i] * truth[i];
    if (t <= kProbFloor)
        throw std::domain_error("empty-fuzzy-set: logical probability is zero");
    double info = 0.0;
    for (std::size_t i = 0; i < sampling.size(); ++i) {
        if (sampling[i] <= kProbFloor) continue;
        info += sampling[i] * (truth[i] > kProbFloor ? std::log2(truth[i] / t) : kNegInfoBits);
    }
    return info;
}

struct SemanticMutualInfo {
    double info_bits = 0.0;        // I(X;Theta)
    double cond_entropy_bits = 0.0;  // H(X|Theta)
};

// I(X;Theta) = sum_j sum_i P(x_i) P(y_j|x_i) log2( T(theta_j|x_i)/T(theta_j) )
// and the generalized posterior entropy H(X|Theta).
inline SemanticMutualInfo semantic_mutual_info(const Distribution& prior, const Channel& shannon,
                                               const SemanticChannel& sem) {
    if (shannon.input() != prior.support())
        throw std::invalid_argument("semantic_mutual_info: prior/channel mismatch");
    if (sem.size() != shannon.n_outputs())
        throw std::invalid_argument("semantic_mutual_info: semantic channel row count");
    SemanticMutualInfo out;
    for (std::size_t j = 0; j < sem.size(); ++j) {
        const TruthRow& truth = sem[j];
        if (truth.support() != prior.support())
            throw std::invalid_argument("semantic_mutual_info: truth row support");
        double t = 0.0;
        for (std::size_t i = 0; i < prior.size(); ++i) t += prior[i] * truth[i];
        if (t <= kProbFloor)
            throw std::domain_error("empty-fuzzy-set: logical probability is zero");
        for (std::size_t i = 0; i < prior.size(); ++i) {
            double joint = prior[i] * shannon(j, i);
            if (joint <= kProbFloor) continue;
            double info = truth[i] > kProbFloor ? std::log2(truth[i] / t) : kNegInfoBits;
            out.info_bits += joint * info;
            double lik = prior[i] * truth[i] / t;
            out.cond_entropy_bits -= joint * slog2(lik);
        }
    }
    return out;
}

// Optimal truth row for a fixed transition row: divide by its maximum.
inline TruthRow optimize_truth_row_from_channel(const Alphabet& support,
                                                const std::vector<double>& channel_row) {
    if (channel_row.size() != support.size())
        throw std::invalid_argument("optimize_truth_row: size mismatch");
    double m = 0.0;
    for (double p : channel_row) m = std::max(m, p);
    if (m <= 0.0)
        throw std::domain_error("empty-hypothesis: all-zero channel row");
    std::vector<double> t(channel_row.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = channel_row[i] / m;
    return TruthRow(support, std::move(t));
}

// The same optimum reached from a sampling distribution and the prior.
inline TruthRow optimize_truth_row_from_sampling(const Distribution& sampling,
                                                 const Distribution& prior) {
    if (sampling.support() != prior.support())
        throw std::invalid_argument("optimize_truth_row: support mismatch");
    std::vector<double> ratio(sampling.size());
    double m = 0.0;
    for (std::size_t i = 0; i < sampling.size(); ++i) {
        if (prior[i] <= kProbFloor) {
            if (sampling[i] > kProbFloor)
                throw std::domain_error("undefined-ratio: prior zero where sampling positive");
            ratio[i] = 0.0;
            continue;
        }
        ratio[i] = sampling[i] / prior[i];
        m = std::max(m, ratio[i]);
    }
    if (m <= 0.0)
        throw std::domain_error("empty-hypothesis: sampling is all zero");
    for (double& r : ratio) r /= m;
    return TruthRow(prior.support(), std::move(ratio));
}

// T(theta_j|X) = b' + b T(y_j|X) with b' = 1 - |b|.
inline TruthRow confidence_truth(const TruthRow& base, double b) {
    if (std::abs(b) > 1.0)
        throw std::invalid_argument("invalid-parameter: |b| must be <= 1");
    for (double v : base.values())
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("confidence_truth: base row must be binary");
    double bp = 1.0 - std::abs(b);
    std::vector<double> t(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) t[i] = bp + b * base[i];
    return TruthRow(base.support(), std::move(t));
}

struct NoConfidenceLevels {
    double b1_prime = 0.0;  // truth value of a counterexample of y1
    double b0_prime = 0.0;
    double lr_plus = 0.0;   // positive likelihood ratio, 1/b1'
    double lr_minus = 0.0;
};

// Optimized no-confidence levels of a 2x2 test channel and the matching
// medical likelihood ratios. Requires output row 1 = positive, row 0 =
// negative, input 1 = infected, input 0 = uninfected.
inline NoConfidenceLevels no_confidence_from_channel(const Channel& test) {
    if (test.n_inputs() != 2 || test.n_outputs() != 2)
        throw std::invalid_argument("no_confidence_from_channel: channel must be 2x2");
    double sens = test(1, 1);
    double specificity = test(0, 0);
    if (sens <= 0.0 || specificity <= 0.0)
        throw std::domain_error("undefined-confidence: zero sensitivity or specificity");
    NoConfidenceLevels r;
    r.b1_prime = test(1, 0) / sens;
    r.b0_prime = test(0, 1) / specificity;
    constexpr double inf = std::numeric_limits<double>::infinity();
    r.lr_plus = r.b1_prime > 0.0 ? 1.0 / r.b1_prime : inf;
    r.lr_minus = r.b0_prime > 0.0 ? 1.0 / r.b0_prime : inf;
    return r;
}

// Log normalized likelihood sum_j sum_i N_ij log2( P(x_i|theta_j)/P(x_i) ).
inline double log_normalized_likelihood(const SampleCounts& counts, const Distribution& prior,
                                        const SemanticChannel& sem) {
    if (counts.n_hypotheses() != sem.size())
        throw std::invalid_argument("log_normalized_likelihood: hypothesis count mismatch");
    if (counts.n_symbols() != prior.size())
        throw std::invalid_argument("log_normalized_likelihood: symbol count mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < sem.size(); ++j) {
        if (counts.total_for(j) == 0) continue;
        SemanticBayesResult sb = semantic_bayes(prior, sem[j]);
        for (std::size_t i = 0; i < prior.size(); ++i) {
            std::int64_t n = counts(j, i);
            if (n == 0) continue;
            double num = sb.likelihood[i];
            double den = prior[i];
            if (den <= kProbFloor)
                throw std::domain_error("undefined-ratio: prior zero with positive count");
            total += static_cast<double>(n) *
                     (num > kProbFloor ? std::log2(num / den) : kNegInfoBits);
        }
    }
    return total;
}

// log2 of the likelihood ratio of a test without a fixed partition; the two
// regions carry sampling distributions and weights P(C1), P(C0).
inline double log_likelihood_ratio(const Distribution& prior,
                                   const Distribution& sampling_pos,
                                   const Distribution& sampling_neg,
                                   double weight_pos, double weight_neg,
                                   const TruthRow& sem_pos, const TruthRow& sem_neg,
                                   std::int64_t n_total) {
    if (std::abs(weight_pos + weight_neg - 1.0) > kSumTol)
        throw std::invalid_argument("log_likelihood_ratio: region weights must sum to 1");
    SemanticBayesResult pos = semantic_bayes(prior, sem_pos);
    SemanticBayesResult neg = semantic_bayes(prior, sem_neg);
    auto region = [&](const Distribution& sampling, const Distribution& top,
                      const Distribution& bot) {
        double s = 0.0;
        for (std::size_t i = 0; i < sampling.size(); ++i) {
            if (sampling[i] <= kProbFloor) continue;
            double a = top[i] > kProbFloor ? std::log2(top[i]) : kNegInfoBits;
            double b = bot[i] > kProbFloor ? std::log2(bot[i]) : kNegInfoBits;
            s += sampling[i] * (a - b);
        }
        return s;
    };
    double n = static_cast<double>(n_total);
    return n * weight_pos * region(sampling_pos, pos.likelihood, neg.likelihood) +
           n * weight_neg * region(sampling_neg, neg.likelihood, pos.likelihood);
}

}  // namespace cmatch
