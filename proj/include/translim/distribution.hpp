#pragma once

#include <string>

namespace translim {

enum class DistKind { Exponential, Gamma, Deterministic };

// Whether a law describes purchase sizes (marks, dollars) or the gaps
// between purchases (days).
enum class DistRole { Mark, InterArrival };

// Parametric law of purchase sizes or inter-purchase times.
//
// Gamma uses the rate parameterization: density proportional to
// x^(shape-1) exp(-rate x), mean shape/rate, Laplace transform
// (rate/(rate+s))^shape. Exponential is the shape == 1 case but is kept as
// its own kind so that its transform is evaluated without a complex power.
class DistributionSpec {
public:
    static DistributionSpec exponential(double rate, DistRole role);
    static DistributionSpec gamma(double shape, double rate, DistRole role);
    static DistributionSpec deterministic(double value, DistRole role);

    DistKind kind() const noexcept { return kind_; }
    DistRole role() const noexcept { return role_; }

    // Exponential and Gamma only; shape() is 1 for Exponential.
    double rate() const noexcept { return rate_; }
    double shape() const noexcept { return shape_; }
    // Deterministic only.
    double value() const noexcept { return value_; }

    double mean() const noexcept;
    double variance() const noexcept;

    // Infimum of Re(s) for which the Laplace transform converges: -rate for
    // Exponential/Gamma, -infinity for a point mass.
    double abscissa() const noexcept;

    double cdf(double x) const;

    // Law of alpha * X.
    DistributionSpec scaled(double alpha) const;

    std::string describe() const;

private:
    DistributionSpec(DistKind kind, DistRole role, double shape, double rate, double value)
        : kind_(kind), role_(role), shape_(shape), rate_(rate), value_(value) {}

    DistKind kind_;
    DistRole role_;
    double shape_;
    double rate_;
    double value_;
};

// Constructor arguments for ModelParams. Defaults are the interchange rate,
// cost of funds and statement length used throughout the worked examples.
struct ModelConfig {
    double gamma_interchange = 0.0054;
    double nu_funding = 0.0007;
    double period_days = 30.0;
    double interest_free_days = 0.0;
    double limit_lo = 0.0;
    double limit_hi = 5000.0;
    DistributionSpec mark;
    DistributionSpec arrival;
};

// Economic and stochastic parameters of one transactor account.
//
// The interest-free period is folded into the statement period once, here;
// every downstream formula sees the single horizon() = T + b.
class ModelParams {
public:
    explicit ModelParams(const ModelConfig& config);

    double gamma_interchange() const noexcept { return gamma_; }
    double nu_funding() const noexcept { return nu_; }
    double period_days() const noexcept { return period_; }
    double interest_free_days() const noexcept { return interest_free_; }
    double horizon() const noexcept { return period_ + interest_free_; }
    double limit_lo() const noexcept { return limit_lo_; }
    double limit_hi() const noexcept { return limit_hi_; }
    const DistributionSpec& mark_dist() const noexcept { return mark_; }
    const DistributionSpec& arrival_dist() const noexcept { return arrival_; }

    // nu / gamma: the marginal balance at which an extra dollar of limit
    // stops paying for itself.
    double cost_ratio() const noexcept { return nu_ / gamma_; }

    // Arrival rate of the Poisson purchase process; throws
    // UnsupportedArrivalLaw when arrivals are not exponential.
    double poisson_rate() const;

    // E[A(horizon)] = (mean purchases per period) * (mean purchase size).
    double expected_spend() const noexcept;

    ModelConfig config() const;
    ModelParams with_mark(const DistributionSpec& mark) const;
    ModelParams with_limit_set(double lo, double hi) const;
    // Purchase sizes scaled by alpha; everything else unchanged.
    ModelParams with_scaled_marks(double alpha) const;

private:
    double gamma_;
    double nu_;
    double period_;
    double interest_free_;
    double limit_lo_;
    double limit_hi_;
    DistributionSpec mark_;
    DistributionSpec arrival_;
};

// Compound Poisson account at the default economics: Poisson purchases at
// `arrival_rate` per day with the given purchase-size law.
ModelParams compound_poisson_params(double arrival_rate, const DistributionSpec& mark,
                                    double limit_hi = 5000.0);

}  // namespace translim
