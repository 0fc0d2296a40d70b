#pragma once

#include <cmath>
#include <complex>

#include "translim/distribution.hpp"

namespace translim::testing {

inline DistributionSpec exp_mark(double rate) {
    return DistributionSpec::exponential(rate, DistRole::Mark);
}

inline DistributionSpec gamma_mark(double shape, double rate) {
    return DistributionSpec::gamma(shape, rate, DistRole::Mark);
}

// Poisson purchases at `lambda` per day with Exponential(mu) sizes, default
// economics (gamma 0.0054, nu 0.0007, T 30).
inline ModelParams cpp_exp(double lambda, double mu, double limit_hi = 5000.0) {
    return compound_poisson_params(lambda, exp_mark(mu), limit_hi);
}

// The customer fitted from transaction data.
inline ModelParams fitted_customer() {
    return compound_poisson_params(0.6451, gamma_mark(2.8946, 0.0769));
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double rel_err(std::complex<double> got, std::complex<double> want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace translim::testing
