#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace carbonprice {

/// Standard normal helpers, accurate to double precision.
namespace normal {
double cdf(double x);
double pdf(double x);
double quantile(double p);
}  // namespace normal

/// Immutable Monte-Carlo sample. Copies share the underlying buffer.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const;
    std::size_t size() const { return data_ ? data_->size() : 0; }
    double operator[](std::size_t i) const { return (*data_)[i]; }
    double mean() const;
    double second_moment() const;

private:
    std::shared_ptr<const std::vector<double>> data_;
};

/// Positive, mean-one multiplier X applied to a firm's reference emissions.
///
/// Three families are supported:
///  - degenerate: X = 1 almost surely (deterministic emissions);
///  - lognormal(-s^2/2, s): location is forced so that E[X] = 1;
///  - empirical: a sample rescaled to mean one at construction.
///
/// VaR uses the left-continuous definition inf{y : P[X <= y] >= 1 - eps};
/// ES is the tail average (1/eps) * int_0^eps VaR_u du.
class EmissionDistribution {
public:
    enum class Kind { degenerate, lognormal, empirical };

    /// Degenerate.
    EmissionDistribution() = default;

    static EmissionDistribution degenerate();
    /// `sigma` is the log-scale volatility s >= 0; s = 0 yields `degenerate()`.
    static EmissionDistribution lognormal(double sigma);
    static EmissionDistribution empirical(const Sample& sample);

    Kind kind() const { return kind_; }
    bool is_degenerate() const { return kind_ == Kind::degenerate; }
    /// Only the lognormal family is continuously differentiable in VaR/ES.
    bool is_smooth() const { return kind_ == Kind::lognormal; }
    double log_sigma() const { return sigma_; }
    double log_mu() const { return -0.5 * sigma_ * sigma_; }
    std::string describe() const;

    double mean() const;
    /// E[X^2] = 1 + Var(X).
    double sigma2() const { return sigma2_; }

    double survival(double t) const;
    double survival_derivative(double t) const;
    double var(double eps) const;
    double es(double eps) const;

    /// Sorted, mean-one sample backing an empirical distribution.
    std::span<const double> empirical_values() const;

private:
    Kind kind_ = Kind::degenerate;
    double sigma_ = 0.0;
    double sigma2_ = 1.0;
    std::shared_ptr<const std::vector<double>> sorted_;
    std::shared_ptr<const std::vector<double>> tail_sums_;  // tail_sums_[k] = sum of the k largest
    double bandwidth_ = 0.0;
};

/// Reproducible sample of `n` draws. Draw k depends only on (seed, k), so the
/// result is identical for any `threads` value.
Sample mc_sample(const EmissionDistribution& dist, std::size_t n, std::uint64_t seed,
                 unsigned threads = 1);

/// Uniform (0,1) variate at position `index` of the stream `seed`.
double counter_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace carbonprice
