#pragma once

// Finite discrete probability primitives: alphabets, distributions,
// transition channels, entropies, divergences and discretized Gaussians.
// All information quantities are in bits (log base 2), 0*log(0) = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmatch {

// Saturating stand-in for log2(0) in information values, so traces stay
// totally ordered instead of aborting on -inf.
inline constexpr double kNegInfoBits = -1e12;

// Probabilities below this are treated as exact zeros in log arguments.
inline constexpr double kProbFloor = 1e-300;

inline constexpr double kSumTol = 1e-9;

// log2(p) with the saturating convention for p == 0.
inline double slog2(double p) {
    return p > kProbFloor ? std::log2(p) : kNegInfoBits;
}

// Ordered alphabet of symbols; symbols are real numbers (grid values or
// class indices).
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<double> labels) : labels_(std::move(labels)) {
        if (labels_.empty())
            throw std::invalid_argument("alphabet: empty label set");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            for (std::size_t k = i + 1; k < labels_.size(); ++k)
                if (labels_[i] == labels_[k])
                    throw std::invalid_argument("alphabet: duplicate label");
    }

    // Integer grid lo..hi inclusive, strictly increasing.
    static Alphabet range(int lo, int hi) {
        if (hi < lo) throw std::invalid_argument("alphabet: bad range");
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (int z = lo; z <= hi; ++z) v.push_back(static_cast<double>(z));
        return Alphabet(std::move(v));
    }

    // Class labels 0..n-1.
    static Alphabet indexed(std::size_t n) {
        if (n == 0) throw std::invalid_argument("alphabet: empty");
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
        return Alphabet(std::move(v));
    }

    std::size_t size() const { return labels_.size(); }
    double operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<double>& labels() const { return labels_; }

    bool is_grid() const {
        for (std::size_t i = 1; i < labels_.size(); ++i)
            if (labels_[i] <= labels_[i - 1]) return false;
        return true;
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.labels_ == b.labels_;
    }
    friend bool operator!=(const Alphabet& a, const Alphabet& b) { return !(a == b); }

private:
    std::vector<double> labels_;
};

// Probability vector over an alphabet. Masses are validated to be
// non-negative and to sum to 1 within kSumTol.
class Distribution {
public:
    Distribution() = default;

    Distribution(Alphabet support, std::vector<double> mass)
        : support_(std::move(support)), mass_(std::move(mass)) {
        if (mass_.size() != support_.size())
            throw std::invalid_argument("distribution: mass/support size mismatch");
        double sum = 0.0;
        for (double m : mass_) {
            if (!(m >= 0.0))
                throw std::invalid_argument("distribution: negative mass");
            sum += m;
        }
        if (std::abs(sum - 1.0) > kSumTol)
            throw std::invalid_argument("distribution: masses sum to " + std::to_string(sum));
    }

    // Normalizes an arbitrary non-negative weight vector.
    static Distribution normalized(Alphabet support, std::vector<double> weight) {
        double sum = 0.0;
        for (double w : weight) {
            if (!(w >= 0.0)) throw std::invalid_argument("distribution: negative weight");
            sum += w;
        }
        if (sum <= 0.0)
            throw std::domain_error("degenerate-distribution: all weights zero");
        for (double& w : weight) w /= sum;
        return Distribution(std::move(support), std::move(weight));
    }

    static Distribution uniform(Alphabet support) {
        std::vector<double> m(support.size(), 1.0 / static_cast<double>(support.size()));
        return Distribution(std::move(support), std::move(m));
    }

    const Alphabet& support() const { return support_; }
    std::size_t size() const { return mass_.size(); }
    double operator[](std::size_t i) const { return mass_[i]; }
    const std::vector<double>& mass() const { return mass_; }

private:
    Alphabet support_;
    std::vector<double> mass_;
};

// Shannon channel: one transition probability function P(y_j|X) per row.
// In this orientation the rows are indexed by the output symbol y_j and
// sum to 1 over j for each fixed input x_i.
class Channel {
public:
    Channel() = default;

    Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows)
        : input_(std::move(input)), output_(std::move(output)), rows_(std::move(rows)) {
        if (rows_.size() != output_.size())
            throw std::invalid_argument("channel: row count != output size");
        for (const auto& r : rows_)
            if (r.size() != input_.size())
                throw std::invalid_argument("channel: row length != input size");
        for (std::size_t i = 0; i < input_.size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < rows_.size(); ++j) {
                double p = rows_[j][i];
                if (!(p >= 0.0) || p > 1.0 + kSumTol)
                    throw std::invalid_argument("channel: entry outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kSumTol)
                throw std::invalid_argument("channel: input column not normalized");
        }
    }

    const Alphabet& input() const { return input_; }
    const Alphabet& output() const { return output_; }
    std::size_t n_inputs() const { return input_.size(); }
    std::size_t n_outputs() const { return rows_.size(); }
    const std::vector<double>& row(std::size_t j) const { return rows_[j]; }
    double operator()(std::size_t j, std::size_t i) const { return rows_[j][i]; }

private:
    Alphabet input_;
    Alphabet output_;
    std::vector<std::vector<double>> rows_;  // [j][i]
};

// Joint statistics of a prior and a channel: joint table, output marginal
// and Bayes posteriors. Posterior rows with zero marginal stay empty.
struct JointStats {
    Distribution marginal_y;
    std::vector<std::vector<double>> joint;             // [j][i], sums to 1
    std::vector<std::optional<Distribution>> posteriors;  // P(X|y_j)
};

// mass(z) proportional to exp(-(z-center)^2 / (2 stddev^2)), renormalized
// over the grid.
inline Distribution discretized_gaussian(const Alphabet& grid, double center, double stddev) {
    if (!(stddev > 0.0))
        throw std::invalid_argument("invalid-parameter: stddev must be > 0");
    std::vector<double> w(grid.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double u = (grid[k] - center) / stddev;
        w[k] = std::exp(-0.5 * u * u);
        sum += w[k];
    }
    if (sum <= 0.0)
        throw std::domain_error("degenerate-distribution: all densities underflow");
    for (double& x : w) x /= sum;
    return Distribution(grid, std::move(w));
}

// Gaussian probability of the interval a grid cell covers; cell k spans the
// midpoints to its neighbours and the edge cells absorb the tails, so the
// masses sum to 1 exactly. Models a continuous observable binned to the grid.
inline Distribution gaussian_cell_masses(const Alphabet& grid, double center, double stddev) {
    if (!(stddev > 0.0))
        throw std::invalid_argument("invalid-parameter: stddev must be > 0");
    if (!grid.is_grid())
        throw std::invalid_argument("invalid-parameter: alphabet is not an increasing grid");
    const std::size_t n = grid.size();
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - center) / (stddev * std::sqrt(2.0))); };
    std::vector<double> m(n);
    double prev = 0.0;  // CDF at -inf
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double edge = cdf(0.5 * (grid[k] + grid[k + 1]));
        m[k] = edge - prev;
        prev = edge;
    }
    m[n - 1] = 1.0 - prev;
    for (double& x : m) x = std::max(x, 0.0);
    return Distribution(grid, std::move(m));
}

// Shannon entropy in bits.
inline double entropy(const Distribution& p) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > kProbFloor) h -= p[i] * std::log2(p[i]);
    return h;
}

// KL divergence in bits, averaging under p. Requires q > 0 wherever p > 0.
inline double kl_divergence(const Distribution& p, const Distribution& q) {
    if (p.support() != q.support())
        throw std::invalid_argument("kl_divergence: support mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= kProbFloor) continue;
        if (q[i] <= kProbFloor)
            throw std::domain_error("divergence-undefined: q zero where p positive");
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d;
}

inline JointStats channel_stats(const Distribution& prior, const Channel& channel) {
    if (channel.input() != prior.support())
        throw std::invalid_argument("channel_stats: prior/channel alphabet mismatch");
    const std::size_t nj = channel.n_outputs();
    const std::size_t ni = channel.n_inputs();
    JointStats s;
    s.joint.assign(nj, std::vector<double>(ni, 0.0));
    std::vector<double> py(nj, 0.0);
    for (std::size_t j = 0; j < nj; ++j) {
        for (std::size_t i = 0; i < ni; ++i) {
            s.joint[j][i] = prior[i] * channel(j, i);
            py[j] += s.joint[j][i];
        }
    }
    s.marginal_y = Distribution(channel.output(), py);
    s.posteriors.resize(nj);
    for (std::size_t j = 0; j < nj; ++j) {
        if (py[j] <= kProbFloor) continue;  // posterior undefined for this row
        std::vector<double> post(ni);
        for (std::size_t i = 0; i < ni; ++i) post[i] = s.joint[j][i] / py[j];
        s.posteriors[j] = Distribution(prior.support(), std::move(post));
    }
    return s;
}

// I(X;Y) in bits.
inline double mutual_information(const Distribution& prior, const Channel& channel) {
    JointStats s = channel_stats(prior, channel);
    double info = 0.0;
    for (std::size_t j = 0; j < channel.n_outputs(); ++j) {
        double py = s.marginal_y[j];
        if (py <= kProbFloor) continue;
        for (std::size_t i = 0; i < channel.n_inputs(); ++i) {
            double joint = s.joint[j][i];
            if (joint <= kProbFloor) continue;
            info += joint * std::log2(channel(j, i) / py);
        }
    }
    return info;
}

}  // namespace cmatch
