#include "translim/transforms.hpp"

#include <cmath>
#include <sstream>

#include "complex_math.hpp"
#include "translim/error.hpp"

namespace translim {

namespace {

using detail::expm1;
using detail::log1p;

void require_role(const DistributionSpec& spec, DistRole role, const char* op) {
    if (spec.role() != role) {
        throw Error(ErrorCode::InvalidSpec,
                    std::string(op) + " called with a distribution of the wrong role");
    }
}

void require_region(const DistributionSpec& spec, cplx s, const char* what) {
    if (!(s.real() > spec.abscissa())) {
        std::ostringstream os;
        os << what << " = " << s << " lies outside Re > " << spec.abscissa() << " for "
           << spec.describe();
        throw Error(ErrorCode::ArgumentOutsideRegion, os.str());
    }
}

void require_nonzero(cplx s, const char* what) {
    if (s == cplx(0.0, 0.0)) throw Error(ErrorCode::PoleAtOrigin, std::string(what) + " is 0");
}

// Unchecked evaluations; callers validate role and region.
cplx laplace(const DistributionSpec& spec, cplx s) {
    switch (spec.kind()) {
        case DistKind::Exponential: return spec.rate() / (spec.rate() + s);
        case DistKind::Gamma: return std::exp(-spec.shape() * log1p(s / spec.rate()));
        case DistKind::Deterministic: return std::exp(-s * spec.value());
    }
    return {};
}

// 1 - laplace(s), accurate when s is near 0.
cplx one_minus_laplace(const DistributionSpec& spec, cplx s) {
    switch (spec.kind()) {
        case DistKind::Exponential: return s / (spec.rate() + s);
        case DistKind::Gamma: return -expm1(-spec.shape() * log1p(s / spec.rate()));
        case DistKind::Deterministic: return -expm1(-s * spec.value());
    }
    return {};
}

cplx laplace_derivative(const DistributionSpec& spec, cplx s) {
    switch (spec.kind()) {
        case DistKind::Exponential: {
            const cplx d = spec.rate() + s;
            return -spec.rate() / (d * d);
        }
        case DistKind::Gamma: return -spec.shape() / (spec.rate() + s) * laplace(spec, s);
        case DistKind::Deterministic: return -spec.value() * std::exp(-s * spec.value());
    }
    return {};
}

// Shared core of the limit-domain expectation transforms: the transform of
// dE[B_l(t)]/dl at real-time t under Poisson arrivals.
cplx derivative_theta_core(const ModelParams& params, double t, cplx theta) {
    const auto& mark = params.mark_dist();
    if (mark.kind() == DistKind::Deterministic) {
        throw Error(ErrorCode::UnsupportedLaw,
                    "lattice purchase sizes make E[B_l(t)] a step function in l");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::NonPositiveTime, "time must be finite and non-negative");
    }
    const double lambda = params.poisson_rate();
    require_region(mark, theta, "theta");
    if (t == 0.0) return {0.0, 0.0};
    const cplx q = one_minus_laplace(mark, theta);
    return -laplace_derivative(mark, theta) * detail::one_minus_exp_over(q, lambda * t);
}

}  // namespace

cplx mark_transform(const DistributionSpec& spec, cplx theta) {
    require_role(spec, DistRole::Mark, "mark_transform");
    require_region(spec, theta, "theta");
    return laplace(spec, theta);
}

cplx mark_transform_derivative(const DistributionSpec& spec, cplx theta) {
    require_role(spec, DistRole::Mark, "mark_transform_derivative");
    require_region(spec, theta, "theta");
    return laplace_derivative(spec, theta);
}

cplx arrival_transform(const DistributionSpec& spec, cplx omega) {
    require_role(spec, DistRole::InterArrival, "arrival_transform");
    require_region(spec, omega, "omega");
    return laplace(spec, omega);
}

cplx tail_triple_transform(const ModelParams& params, cplx theta, cplx omega, cplx psi) {
    require_nonzero(theta, "theta");
    require_nonzero(omega, "omega");
    require_nonzero(psi, "psi");
    const auto& mark = params.mark_dist();
    const cplx g = arrival_transform(params.arrival_dist(), omega);
    const cplx f_theta = mark_transform(mark, theta);
    require_region(mark, theta + psi, "theta + psi");
    const cplx f_shift = laplace(mark, theta + psi);
    const cplx loop = g * f_shift;
    if (!(std::abs(loop) < 1.0)) {
        std::ostringstream os;
        os << "|g~(omega) f~(theta+psi)| = " << std::abs(loop) << " >= 1";
        throw Error(ErrorCode::DivergentGeometricTerm, os.str());
    }
    return g * (f_theta - f_shift) / (theta * omega * psi * (1.0 - loop));
}

cplx expectation_transform_2d(const ModelParams& params, cplx theta, cplx omega) {
    require_nonzero(theta, "theta");
    require_nonzero(omega, "omega");
    const cplx g = arrival_transform(params.arrival_dist(), omega);
    const cplx f = mark_transform(params.mark_dist(), theta);
    const cplx loop = g * f;
    if (!(std::abs(loop) < 1.0)) {
        throw Error(ErrorCode::DivergentGeometricTerm, "|g~(omega) f~(theta)| >= 1");
    }
    const cplx df = laplace_derivative(params.mark_dist(), theta);
    return -g * df / (theta * omega * (1.0 - loop));
}

cplx derivative_transform_2d(const ModelParams& params, cplx theta, cplx omega) {
    return theta * expectation_transform_2d(params, theta, omega);
}

cplx expectation_transform_theta(const ModelParams& params, double t, cplx theta) {
    require_nonzero(theta, "theta");
    return derivative_theta_core(params, t, theta) / theta;
}

cplx expectation_derivative_transform_theta(const ModelParams& params, double t, cplx theta) {
    return derivative_theta_core(params, t, theta);
}

cplx aggregate_tail_transform(const ModelParams& params, double horizon, cplx psi) {
    require_nonzero(psi, "psi");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw Error(ErrorCode::NonPositiveTime, "horizon must be finite and non-negative");
    }
    const double lambda = params.poisson_rate();
    const auto& mark = params.mark_dist();
    require_role(mark, DistRole::Mark, "aggregate_tail_transform");
    require_region(mark, psi, "psi");
    return -expm1(-lambda * horizon * one_minus_laplace(mark, psi)) / psi;
}

cplx aggregate_tail_transform(const ModelParams& params, cplx psi) {
    return aggregate_tail_transform(params, params.horizon(), psi);
}

cplx min_expectation_transform(const ModelParams& params, double horizon, cplx theta) {
    return aggregate_tail_transform(params, horizon, theta) / theta;
}

cplx min_expectation_transform(const ModelParams& params, cplx theta) {
    return min_expectation_transform(params, params.horizon(), theta);
}

TransformFn expectation_transform_fn(const ModelParams& params, double t) {
    return {[params, t](cplx s) { return expectation_transform_theta(params, t, s); }, 0.0};
}

TransformFn expectation_derivative_transform_fn(const ModelParams& params, double t) {
    return {[params, t](cplx s) { return expectation_derivative_transform_theta(params, t, s); },
            params.mark_dist().abscissa()};
}

TransformFn aggregate_tail_transform_fn(const ModelParams& params, double horizon) {
    return {[params, horizon](cplx s) { return aggregate_tail_transform(params, horizon, s); },
            params.mark_dist().abscissa()};
}

TransformFn min_expectation_transform_fn(const ModelParams& params, double horizon) {
    return {[params, horizon](cplx s) { return min_expectation_transform(params, horizon, s); },
            0.0};
}

}  // namespace translim
