#pragma once

#include <span>
#include <vector>

#include "translim/transforms.hpp"

namespace translim {

// Parameters of the Euler-summation Fourier-series inversion.
//
// The Bromwich line sits at Re(s) = A / (2t), so the aliasing error is of
// order e^{-A} times the size of f near 3t. n_terms partial sums are taken
// directly and then m_avg + 1 further ones are binomially averaged.
struct EulerConfig {
    double A = 24.0;
    int n_terms = 60;
    int m_avg = 15;

    void validate() const;
};

// Inverse Laplace transform of `transform` evaluated at t > 0.
double invert(const TransformFn& transform, double t, const EulerConfig& config = {});

// Element-wise invert(); failures are rethrown with the offending index.
std::vector<double> invert_batch(const TransformFn& transform, std::span<const double> ts,
                                 const EulerConfig& config = {});

}  // namespace translim
