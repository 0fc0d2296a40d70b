#pragma once

#include <complex>
#include <functional>

#include "translim/distribution.hpp"

namespace translim {

using cplx = std::complex<double>;

// A Laplace transform together with its abscissa of convergence: eval is
// defined for Re(s) > sigma.
struct TransformFn {
    std::function<cplx(cplx)> eval;
    double sigma = 0.0;

    cplx operator()(cplx s) const { return eval(s); }
};

// f~(theta) = E[exp(-theta X)] for a purchase-size law (role Mark).
cplx mark_transform(const DistributionSpec& spec, cplx theta);
// d f~ / d theta.
cplx mark_transform_derivative(const DistributionSpec& spec, cplx theta);
// g~(omega) for an inter-purchase-time law (role InterArrival).
cplx arrival_transform(const DistributionSpec& spec, cplx omega);

// Triple transform of the tail function P(B_l(t) in (y, l]) over
// (limit l -> theta, time t -> omega, level y -> psi):
//
//   S~ = g~(w) (f~(th) - f~(th+ps)) / (th w ps (1 - g~(w) f~(th+ps)))
//
// Valid for any renewal arrival law.
cplx tail_triple_transform(const ModelParams& params, cplx theta, cplx omega, cplx psi);

// psi -> 0 limit of S~: the (limit, time) transform of E[B_l(t)],
//   -g~(w) f~'(th) / (th w (1 - g~(w) f~(th))).
cplx expectation_transform_2d(const ModelParams& params, cplx theta, cplx omega);
// theta times the above: the (limit, time) transform of dE[B_l(t)]/dl.
cplx derivative_transform_2d(const ModelParams& params, cplx theta, cplx omega);

// Transform over the limit of E[B_l(t)] at fixed t, after inverting the
// time variable analytically (needs Poisson arrivals at rate lambda):
//
//   -f~'(th) / th * (1 - exp(-lambda t (1 - f~(th)))) / (1 - f~(th))
//
// For Gamma(k, mu) marks -f~'(th) = k/(mu+th) f~(th).
cplx expectation_transform_theta(const ModelParams& params, double t, cplx theta);
// Transform over the limit of dE[B_l(t)]/dl; equals theta times the above.
cplx expectation_derivative_transform_theta(const ModelParams& params, double t, cplx theta);

// Transform of the tail function P(A(T) > y) of the compound Poisson
// attempted spend over the horizon, (1 - exp(lambda T (f~(ps) - 1))) / ps.
cplx aggregate_tail_transform(const ModelParams& params, cplx psi);
cplx aggregate_tail_transform(const ModelParams& params, double horizon, cplx psi);

// Transform over the limit of E[min(A(T), l)]: aggregate tail over theta.
cplx min_expectation_transform(const ModelParams& params, cplx theta);
cplx min_expectation_transform(const ModelParams& params, double horizon, cplx theta);

// Bound versions for the inversion engine. The expectation and
// min-expectation transforms carry a pole at the origin (abscissa 0); the
// derivative and tail transforms are analytic there and inherit the mark
// law's abscissa.
TransformFn expectation_transform_fn(const ModelParams& params, double t);
TransformFn expectation_derivative_transform_fn(const ModelParams& params, double t);
TransformFn aggregate_tail_transform_fn(const ModelParams& params, double horizon);
TransformFn min_expectation_transform_fn(const ModelParams& params, double horizon);

}  // namespace translim
