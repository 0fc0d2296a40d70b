#include "translim/distribution.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "translim/error.hpp"

namespace translim {

namespace {

std::string num(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be finite and strictly positive, got " << v;
        throw Error(ErrorCode::InvalidSpec, os.str());
    }
}

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate, DistRole role) {
    require_positive(rate, "exponential rate");
    return DistributionSpec(DistKind::Exponential, role, 1.0, rate, 0.0);
}

DistributionSpec DistributionSpec::gamma(double shape, double rate, DistRole role) {
    require_positive(shape, "gamma shape");
    require_positive(rate, "gamma rate");
    return DistributionSpec(DistKind::Gamma, role, shape, rate, 0.0);
}

DistributionSpec DistributionSpec::deterministic(double value, DistRole role) {
    require_positive(value, "deterministic value");
    return DistributionSpec(DistKind::Deterministic, role, 0.0, 0.0, value);
}

double DistributionSpec::mean() const noexcept {
    if (kind_ == DistKind::Deterministic) return value_;
    return shape_ / rate_;
}

double DistributionSpec::variance() const noexcept {
    if (kind_ == DistKind::Deterministic) return 0.0;
    return shape_ / (rate_ * rate_);
}

double DistributionSpec::abscissa() const noexcept {
    if (kind_ == DistKind::Deterministic) return -std::numeric_limits<double>::infinity();
    return -rate_;
}

double DistributionSpec::cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    switch (kind_) {
        case DistKind::Exponential: return -std::expm1(-rate_ * x);
        case DistKind::Gamma: return boost::math::gamma_p(shape_, rate_ * x);
        case DistKind::Deterministic: return x >= value_ ? 1.0 : 0.0;
    }
    return 0.0;
}

DistributionSpec DistributionSpec::scaled(double alpha) const {
    require_positive(alpha, "scale factor");
    switch (kind_) {
        case DistKind::Exponential: return exponential(rate_ / alpha, role_);
        case DistKind::Gamma: return gamma(shape_, rate_ / alpha, role_);
        case DistKind::Deterministic: return deterministic(value_ * alpha, role_);
    }
    return *this;
}

std::string DistributionSpec::describe() const {
    switch (kind_) {
        case DistKind::Exponential: return "Exponential(rate=" + num(rate_) + ")";
        case DistKind::Gamma: return "Gamma(shape=" + num(shape_) + ", rate=" + num(rate_) + ")";
        case DistKind::Deterministic: return "Deterministic(" + num(value_) + ")";
    }
    return "unknown";
}

ModelParams::ModelParams(const ModelConfig& c)
    : gamma_(c.gamma_interchange),
      nu_(c.nu_funding),
      period_(c.period_days),
      interest_free_(c.interest_free_days),
      limit_lo_(c.limit_lo),
      limit_hi_(c.limit_hi),
      mark_(c.mark),
      arrival_(c.arrival) {
    if (!(gamma_ > 0.0 && gamma_ < 1.0))
        throw Error(ErrorCode::InvalidSpec, "interchange rate must lie in (0, 1)");
    if (!(nu_ > 0.0 && nu_ < 1.0))
        throw Error(ErrorCode::InvalidSpec, "cost of funds must lie in (0, 1)");
    if (!(period_ > 0.0) || !std::isfinite(period_))
        throw Error(ErrorCode::InvalidSpec, "statement period must be positive");
    if (!(interest_free_ >= 0.0) || !std::isfinite(interest_free_))
        throw Error(ErrorCode::InvalidSpec, "interest-free period must be non-negative");
    if (!(limit_lo_ >= 0.0 && limit_lo_ < limit_hi_) || !std::isfinite(limit_hi_))
        throw Error(ErrorCode::InvalidSpec, "limit set must satisfy 0 <= lo < hi < inf");
    if (mark_.role() != DistRole::Mark)
        throw Error(ErrorCode::InvalidSpec, "mark distribution must have the Mark role");
    if (arrival_.role() != DistRole::InterArrival)
        throw Error(ErrorCode::InvalidSpec, "arrival distribution must have the InterArrival role");
}

double ModelParams::poisson_rate() const {
    if (arrival_.kind() != DistKind::Exponential)
        throw Error(ErrorCode::UnsupportedArrivalLaw,
                    "closed-form transforms need Poisson arrivals, got " + arrival_.describe());
    return arrival_.rate();
}

double ModelParams::expected_spend() const noexcept {
    // Elementary renewal approximation for non-Poisson arrivals; exact for
    // Poisson.
    return horizon() / arrival_.mean() * mark_.mean();
}

ModelConfig ModelParams::config() const {
    return ModelConfig{gamma_, nu_, period_, interest_free_, limit_lo_, limit_hi_, mark_, arrival_};
}

ModelParams ModelParams::with_mark(const DistributionSpec& mark) const {
    auto c = config();
    c.mark = mark;
    return ModelParams(c);
}

ModelParams ModelParams::with_limit_set(double lo, double hi) const {
    auto c = config();
    c.limit_lo = lo;
    c.limit_hi = hi;
    return ModelParams(c);
}

ModelParams ModelParams::with_scaled_marks(double alpha) const {
    return with_mark(mark_.scaled(alpha));
}

ModelParams compound_poisson_params(double arrival_rate, const DistributionSpec& mark,
                                    double limit_hi) {
    return ModelParams(ModelConfig{
        .limit_hi = limit_hi,
        .mark = mark,
        .arrival = DistributionSpec::exponential(arrival_rate, DistRole::InterArrival),
    });
}

}  // namespace translim
