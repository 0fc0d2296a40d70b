#include "translim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "translim/error.hpp"

namespace translim {

namespace {

void validate(const BalanceQuery& q) {
    if (!(q.limit >= 0.0) || !std::isfinite(q.limit)) {
        std::ostringstream os;
        os << "limit must be finite and non-negative, got " << q.limit;
        throw Error(ErrorCode::ArgumentOutsideRegion, os.str());
    }
    if (!(q.horizon > 0.0) || !std::isfinite(q.horizon)) {
        throw Error(ErrorCode::NonPositiveTime, "horizon must be positive");
    }
}

}  // namespace

BalanceQuery make_query(const ModelParams& params, double limit) {
    return BalanceQuery{params, limit, params.horizon()};
}

double expected_balance(const BalanceQuery& q, const EulerConfig& euler) {
    validate(q);
    if (q.limit == 0.0) return 0.0;
    const double v = invert(expectation_transform_fn(q.params, q.horizon), q.limit, euler);
    return std::clamp(v, 0.0, q.limit);
}

double balance_derivative(const BalanceQuery& q, const EulerConfig& euler) {
    validate(q);
    if (q.limit == 0.0) {
        throw Error(ErrorCode::ArgumentOutsideRegion, "the derivative needs a positive limit");
    }
    const double v =
        invert(expectation_derivative_transform_fn(q.params, q.horizon), q.limit, euler);
    return std::clamp(v, 0.0, 1.0);
}

double decline_probability(const BalanceQuery& q, const EulerConfig& euler) {
    validate(q);
    if (q.limit == 0.0) {
        // Any purchase at all is declined.
        return -std::expm1(-q.params.poisson_rate() * q.horizon);
    }
    const double v = invert(aggregate_tail_transform_fn(q.params, q.horizon), q.limit, euler);
    return std::clamp(v, 0.0, 1.0);
}

double expected_min(const BalanceQuery& q, const EulerConfig& euler) {
    validate(q);
    if (q.limit == 0.0) return 0.0;
    const double v = invert(min_expectation_transform_fn(q.params, q.horizon), q.limit, euler);
    return std::clamp(v, 0.0, q.limit);
}

double expected_profit(const BalanceQuery& q, PolicyKind policy, const EulerConfig& euler) {
    double balance = 0.0;
    switch (policy) {
        case PolicyKind::Freeze: balance = expected_balance(q, euler); break;
        case PolicyKind::NewsvendorTruncation: balance = expected_min(q, euler); break;
        case PolicyKind::Retrial:
            throw Error(ErrorCode::UnsupportedPolicyForAnalytic,
                        "the retrial balance has no closed-form transform; use the simulator");
    }
    return q.params.gamma_interchange() * balance - q.params.nu_funding() * q.limit;
}

}  // namespace translim
