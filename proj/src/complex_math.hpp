#pragma once

#include <cmath>
#include <complex>

namespace translim::detail {

using cplx = std::complex<double>;

// exp(z) - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    const double re = std::expm1(x) * std::cos(y) - 2.0 * s * s;
    const double im = std::exp(x) * std::sin(y);
    return {re, im};
}

// log(1 + z) on the principal branch without cancellation for small |z|.
inline cplx log1p(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double re = 0.5 * std::log1p(x * (2.0 + x) + y * y);
    const double im = std::atan2(y, 1.0 + x);
    return {re, im};
}

// (1 - exp(-c q)) / q, continuous at q = 0 where it equals c.
inline cplx one_minus_exp_over(cplx q, double c) {
    if (q == cplx(0.0, 0.0)) return {c, 0.0};
    return -expm1(-c * q) / q;
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace translim::detail
