#include "translim/inversion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "complex_math.hpp"
#include "translim/error.hpp"

namespace translim {

namespace {

// Binomial(m, k) / 2^m for k = 0..m.
std::vector<double> euler_weights(int m) {
    std::vector<double> w(static_cast<std::size_t>(m) + 1);
    double c = 1.0;
    for (int k = 0; k <= m; ++k) {
        w[static_cast<std::size_t>(k)] = c;
        c = c * (m - k) / (k + 1);
    }
    const double scale = std::ldexp(1.0, -m);
    for (auto& v : w) v *= scale;
    return w;
}

double sample(const TransformFn& transform, cplx s) {
    const cplx v = transform(s);
    if (!detail::finite(v)) {
        std::ostringstream os;
        os << "transform(" << s << ") = " << v;
        throw Error(ErrorCode::NonFiniteTransformValue, os.str());
    }
    return v.real();
}

}  // namespace

void EulerConfig::validate() const {
    if (!(A > 0.0) || !std::isfinite(A) || n_terms < 1 || m_avg < 1) {
        throw Error(ErrorCode::InvalidSpec, "EulerConfig needs A > 0, n_terms >= 1, m_avg >= 1");
    }
}

double invert(const TransformFn& transform, double t, const EulerConfig& config) {
    config.validate();
    if (!(t > 0.0) || !std::isfinite(t)) {
        std::ostringstream os;
        os << "inversion point t = " << t;
        throw Error(ErrorCode::NonPositiveTime, os.str());
    }
    const double x = config.A / (2.0 * t);
    if (!(transform.sigma < x)) {
        std::ostringstream os;
        os << "abscissa " << transform.sigma << " is not below the contour Re(s) = " << x;
        throw Error(ErrorCode::AbscissaViolation, os.str());
    }
    const double h = std::numbers::pi / t;
    const int total = config.n_terms + config.m_avg;

    // Alternating partial sums s_n of the trapezoidal series.
    double partial = 0.5 * sample(transform, cplx(x, 0.0));
    std::vector<double> sums;
    sums.reserve(static_cast<std::size_t>(config.m_avg) + 1);
    for (int j = 1; j <= total; ++j) {
        const double term = sample(transform, cplx(x, j * h));
        partial += (j % 2 == 0) ? term : -term;
        if (j >= config.n_terms) sums.push_back(partial);
    }

    const auto weights = euler_weights(config.m_avg);
    double averaged = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) averaged += weights[k] * sums[k];
    const double result = std::exp(0.5 * config.A) / t * averaged;
    // Oscillatory noise floor.
    return std::abs(result) < 1e-12 ? 0.0 : result;
}

std::vector<double> invert_batch(const TransformFn& transform, std::span<const double> ts,
                                 const EulerConfig& config) {
    std::vector<double> out;
    out.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        try {
            out.push_back(invert(transform, ts[i], config));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "at index " << i << " (t = " << ts[i] << "): " << e.what();
            throw Error(e.code(), os.str());
        }
    }
    return out;
}

}  // namespace translim
