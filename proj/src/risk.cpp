#include "carbonprice/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "carbonprice/errors.hpp"
#include "carbonprice/numeric.hpp"

namespace carbonprice {

namespace normal {

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal quantile: probability outside [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace normal

// ---------------------------------------------------------------------------
// Sample

Sample::Sample(std::vector<double> values)
    : data_(std::make_shared<const std::vector<double>>(std::move(values))) {}

std::span<const double> Sample::values() const {
    if (!data_) return {};
    return {data_->data(), data_->size()};
}

double Sample::mean() const {
    if (size() == 0) throw DomainError("sample mean of empty sample");
    return numeric::pairwise_sum(values()) / static_cast<double>(size());
}

double Sample::second_moment() const {
    if (size() == 0) throw DomainError("second moment of empty sample");
    std::vector<double> sq(values().begin(), values().end());
    for (double& v : sq) v *= v;
    return numeric::pairwise_sum(sq) / static_cast<double>(sq.size());
}

// ---------------------------------------------------------------------------
// EmissionDistribution

EmissionDistribution EmissionDistribution::degenerate() { return EmissionDistribution{}; }

EmissionDistribution EmissionDistribution::lognormal(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw DomainError("lognormal: log-volatility must be finite and >= 0");
    if (sigma == 0.0) return degenerate();
    EmissionDistribution d;
    d.kind_ = Kind::lognormal;
    d.sigma_ = sigma;
    d.sigma2_ = std::exp(sigma * sigma);
    return d;
}

EmissionDistribution EmissionDistribution::empirical(const Sample& sample) {
    if (sample.size() < 2) throw DomainError("empirical distribution needs at least two draws");
    for (double v : sample.values())
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("empirical distribution: draws must be positive and finite");

    const double m = sample.mean();
    std::vector<double> sorted(sample.values().begin(), sample.values().end());
    for (double& v : sorted) v /= m;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> tail(n + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) {
        acc += sorted[n - k];
        tail[k] = static_cast<double>(acc);
    }

    std::vector<double> sq(sorted);
    for (double& v : sq) v *= v;
    const double second = numeric::pairwise_sum(sq) / static_cast<double>(n);
    const double sd = std::sqrt(std::max(second - 1.0, 0.0));

    EmissionDistribution d;
    d.kind_ = Kind::empirical;
    d.sigma2_ = second;
    d.bandwidth_ = 1.06 * std::max(sd, 1e-12) * std::pow(static_cast<double>(n), -0.2);
    d.sorted_ = std::make_shared<const std::vector<double>>(std::move(sorted));
    d.tail_sums_ = std::make_shared<const std::vector<double>>(std::move(tail));
    return d;
}

std::string EmissionDistribution::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::degenerate: os << "deterministic"; break;
        case Kind::lognormal: os << "lognormal(" << log_mu() << ", " << sigma_ << ")"; break;
        case Kind::empirical: os << "empirical(n=" << sorted_->size() << ")"; break;
    }
    return os.str();
}

double EmissionDistribution::mean() const {
    if (kind_ == Kind::empirical) return tail_sums_->back() / static_cast<double>(sorted_->size());
    return 1.0;
}

std::span<const double> EmissionDistribution::empirical_values() const {
    if (!sorted_) return {};
    return {sorted_->data(), sorted_->size()};
}

namespace {

void require_positive_t(double t) {
    if (!(t > 0.0)) throw DomainError("survival: argument must be > 0");
}

void require_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("risk measure: level must lie in (0, 1]");
}

// Empirical CDF P[X <= t].
double empirical_cdf(const std::vector<double>& sorted, double t) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace

double EmissionDistribution::survival(double t) const {
    require_positive_t(t);
    switch (kind_) {
        case Kind::degenerate: return t < 1.0 ? 1.0 : 0.0;
        case Kind::lognormal: return normal::cdf(-(std::log(t) - log_mu()) / sigma_);
        case Kind::empirical: return 1.0 - empirical_cdf(*sorted_, t);
    }
    return 0.0;
}

double EmissionDistribution::survival_derivative(double t) const {
    require_positive_t(t);
    switch (kind_) {
        case Kind::degenerate: return 0.0;
        case Kind::lognormal: return -normal::pdf((std::log(t) - log_mu()) / sigma_) / (sigma_ * t);
        case Kind::empirical: {
            const double lo = std::max(t - bandwidth_, 0.0);
            const double hi = t + bandwidth_;
            return -(empirical_cdf(*sorted_, hi) - empirical_cdf(*sorted_, lo)) / (hi - lo);
        }
    }
    return 0.0;
}

double EmissionDistribution::var(double eps) const {
    require_eps(eps);
    // VaR_1 is the left end of the support, which is 0 for a positive variable.
    if (eps == 1.0) return 0.0;
    switch (kind_) {
        case Kind::degenerate: return 1.0;
        case Kind::lognormal: return std::exp(log_mu() - sigma_ * normal::quantile(eps));
        case Kind::empirical: {
            const auto n = static_cast<double>(sorted_->size());
            const double k = std::ceil(n * (1.0 - eps) * (1.0 - 1e-12));
            if (k < 1.0) return 0.0;
            return (*sorted_)[static_cast<std::size_t>(k) - 1];
        }
    }
    return 0.0;
}

double EmissionDistribution::es(double eps) const {
    require_eps(eps);
    switch (kind_) {
        case Kind::degenerate: return 1.0;
        case Kind::lognormal:
            if (eps == 1.0) return 1.0;
            return normal::cdf(normal::quantile(eps) + sigma_) / eps;
        case Kind::empirical: {
            const std::size_t n = sorted_->size();
            const double m = static_cast<double>(n) * eps;
            const auto j = std::min(static_cast<std::size_t>(std::floor(m)), n);
            double total = (*tail_sums_)[j];
            if (j < n) total += (m - static_cast<double>(j)) * (*sorted_)[n - 1 - j];
            return total / m;
        }
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = splitmix64(seed);
    const std::uint64_t z = splitmix64(key ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

Sample mc_sample(const EmissionDistribution& dist, std::size_t n, std::uint64_t seed, unsigned threads) {
    if (n == 0) throw DomainError("mc_sample: n must be >= 1");
    std::vector<double> out(n);

    auto fill = [&](std::size_t begin, std::size_t end) {
        switch (dist.kind()) {
            case EmissionDistribution::Kind::degenerate:
                std::fill(out.begin() + static_cast<std::ptrdiff_t>(begin),
                          out.begin() + static_cast<std::ptrdiff_t>(end), 1.0);
                break;
            case EmissionDistribution::Kind::lognormal: {
                const double mu = dist.log_mu();
                const double s = dist.log_sigma();
                for (std::size_t k = begin; k < end; ++k)
                    out[k] = std::exp(mu + s * normal::quantile(counter_uniform(seed, k)));
                break;
            }
            case EmissionDistribution::Kind::empirical: {
                const auto values = dist.empirical_values();
                const auto m = static_cast<double>(values.size());
                for (std::size_t k = begin; k < end; ++k) {
                    auto idx = static_cast<std::size_t>(counter_uniform(seed, k) * m);
                    out[k] = values[std::min(idx, values.size() - 1)];
                }
                break;
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1 || n < 4096) {
        fill(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(fill, b, e);
        }
    }
    return Sample(std::move(out));
}

}  // namespace carbonprice
