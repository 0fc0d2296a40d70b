#include "translim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "translim/error.hpp"
#include "translim/model.hpp"

namespace translim {

namespace {

// Smallest limit at which the inversion is evaluated; the transforms are not
// invertible at l = 0.
double lowest_evaluable(const ModelParams& params) {
    return std::max(params.limit_lo(), 1e-9 * params.limit_hi());
}

double freeze_profit(const ModelParams& params, double limit, const EulerConfig& euler) {
    return expected_profit(make_query(params, limit), PolicyKind::Freeze, euler);
}

void fill_freeze_result(const ModelParams& params, double limit, const EulerConfig& euler,
                        OptimizationResult& r) {
    r.limit_star = limit;
    r.profit_at_star = freeze_profit(params, limit, euler);
    r.decline_prob_at_star = decline_probability(make_query(params, limit), euler);
}

OptimizationResult golden_section_freeze(const ModelParams& params, double a, double b,
                                         const SolverOptions& opt) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = freeze_profit(params, c, opt.euler);
    double fd = freeze_profit(params, d, opt.euler);
    int it = 0;
    while (b - a > opt.bracket_tol && it < opt.max_iterations) {
        ++it;
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = freeze_profit(params, c, opt.euler);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = freeze_profit(params, d, opt.euler);
        }
    }
    OptimizationResult r;
    r.iterations = it;
    r.fallback_used = true;
    fill_freeze_result(params, 0.5 * (a + b), opt.euler, r);
    r.residual = std::abs(balance_derivative(make_query(params, r.limit_star), opt.euler) -
                          params.cost_ratio());
    return r;
}

}  // namespace

std::string_view to_string(SolveStatus status) noexcept {
    switch (status) {
        case SolveStatus::Interior: return "interior";
        case SolveStatus::LowerBoundary: return "lower_boundary";
        case SolveStatus::UpperBoundary: return "upper_boundary";
    }
    return "unknown";
}

OptimizationResult optimal_limit_freeze(const ModelParams& params, const SolverOptions& opt) {
    const double target = params.cost_ratio();
    const double lo = lowest_evaluable(params);
    const double hi = params.limit_hi();
    auto derivative = [&](double l) { return balance_derivative(make_query(params, l), opt.euler); };

    const int n = std::max(opt.prescan_points, 2);
    std::vector<double> grid(static_cast<std::size_t>(n));
    std::vector<double> values(grid.size());
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        values[static_cast<std::size_t>(i)] = derivative(grid[static_cast<std::size_t>(i)]);
    }
    // The derivative rises from 0 at l = 0+ (no purchase fits a tiny limit)
    // to a single peak and then decays, so the optimum is the crossing of
    // nu/gamma on the descending side. More than one peak on the scan means
    // the shape assumption failed.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[peak]) peak = i;
    }
    bool unimodal = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double step = values[i] - values[i - 1];
        if ((i <= peak && step < -1e-9) || (i > peak && step > 1e-9)) unimodal = false;
    }
    if (!unimodal) {
        auto r = golden_section_freeze(params, lo, hi, opt);
        r.warning = "NonMonotoneDerivative: golden-section fallback on the profit";
        return r;
    }

    auto boundary_result = [&](const std::string& why) {
        OptimizationResult r;
        const double p_lo =
            params.limit_lo() == 0.0 ? 0.0 : freeze_profit(params, params.limit_lo(), opt.euler);
        const double p_hi = freeze_profit(params, hi, opt.euler);
        const bool take_lo = p_lo >= p_hi;
        r.status = take_lo ? SolveStatus::LowerBoundary : SolveStatus::UpperBoundary;
        r.limit_star = take_lo ? params.limit_lo() : hi;
        r.profit_at_star = take_lo ? p_lo : p_hi;
        r.decline_prob_at_star = decline_probability(make_query(params, r.limit_star), opt.euler);
        r.residual = std::abs((take_lo ? values.front() : values.back()) - target);
        r.warning = why;
        return r;
    };
    if (!(values[peak] > target) || !(values.back() <= target)) {
        std::ostringstream os;
        os << "RootNotBracketed: dE[B]/dl peaks at " << values[peak] << " and ends at "
           << values.back() << " on the limit set, nu/gamma = " << target
           << "; boundary optimum reported";
        return boundary_result(os.str());
    }

    std::size_t i = peak;
    while (!(values[i] > target && values[i + 1] <= target)) ++i;
    double a = grid[i];
    double b = grid[i + 1];
    int it = 0;
    while (b - a > opt.bracket_tol && it < opt.max_iterations) {
        ++it;
        const double mid = 0.5 * (a + b);
        const double v = derivative(mid);
        if (v > target) {
            a = mid;
        } else {
            b = mid;
        }
        if (v == target) a = b = mid;
    }
    OptimizationResult r;
    r.iterations = it;
    fill_freeze_result(params, 0.5 * (a + b), opt.euler, r);
    r.residual = std::abs(derivative(r.limit_star) - target);
    // The ascending side makes the profit dip first; the descending crossing
    // is only the optimum if it beats the lower end point.
    const double p_lo =
        params.limit_lo() == 0.0 ? 0.0 : freeze_profit(params, params.limit_lo(), opt.euler);
    if (p_lo > r.profit_at_star) {
        return boundary_result("interior stationary point is less profitable than the lower end point");
    }
    return r;
}

OptimizationResult newsvendor_limit(const ModelParams& params, const SolverOptions& opt) {
    const double target = params.cost_ratio();
    const double any_purchase = -std::expm1(-params.poisson_rate() * params.horizon());
    if (!(any_purchase > target)) {
        std::ostringstream os;
        os << "P(A(T) > 0) = " << any_purchase << " does not exceed nu/gamma = " << target
           << "; the newsvendor optimum is l* = 0";
        throw Error(ErrorCode::RatioUnattainable, os.str());
    }
    auto decline = [&](double l) { return decline_probability(make_query(params, l), opt.euler); };
    auto profit = [&](double l) {
        return expected_profit(make_query(params, l), PolicyKind::NewsvendorTruncation, opt.euler);
    };

    OptimizationResult r;
    double a = params.limit_lo();
    double b = params.limit_hi();
    const double d_lo = decline(a);
    const double d_hi = decline(b);
    auto finish = [&](double l, SolveStatus status) {
        r.limit_star = l;
        r.status = status;
        r.decline_prob_at_star = decline(l);
        r.profit_at_star = profit(l);
        r.residual = std::abs(r.decline_prob_at_star - target);
        return r;
    };
    if (!(d_lo > target)) {
        r.warning = "RootNotBracketed: the quantile lies below the limit set";
        return finish(a, SolveStatus::LowerBoundary);
    }
    if (d_hi > target) {
        r.warning = "RootNotBracketed: the quantile lies above the limit set";
        return finish(b, SolveStatus::UpperBoundary);
    }
    int it = 0;
    while (b - a > opt.bracket_tol && it < opt.max_iterations) {
        ++it;
        const double mid = 0.5 * (a + b);
        if (decline(mid) > target) {
            a = mid;
        } else {
            b = mid;
        }
    }
    r.iterations = it;
    return finish(0.5 * (a + b), SolveStatus::Interior);
}

BoundsResult retrial_bounds(const ModelParams& params, const SolverOptions& options) {
    BoundsResult out;
    out.newsvendor = newsvendor_limit(params, options);
    out.freeze = optimal_limit_freeze(params, options);
    out.lower = out.newsvendor.limit_star;
    out.upper = out.freeze.limit_star;
    out.gap = out.upper - out.lower;
    return out;
}

LimitReport evaluate_limit(const ModelParams& params, double limit, const EulerConfig& euler) {
    if (!(limit >= 0.0)) throw Error(ErrorCode::ArgumentOutsideRegion, "limit must be non-negative");
    const auto q = make_query(params, limit);
    LimitReport r;
    r.limit = limit;
    r.expected_balance = expected_balance(q, euler);
    r.expected_min = expected_min(q, euler);
    r.expected_profit = params.gamma_interchange() * r.expected_balance - params.nu_funding() * limit;
    r.expected_profit_truncation =
        params.gamma_interchange() * r.expected_min - params.nu_funding() * limit;
    r.decline_prob = decline_probability(q, euler);
    return r;
}

double revised_limit(const ModelParams& params, double limit, double step, const EulerConfig& euler) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidSpec, "rounding step must be positive");
    const double below = std::floor(limit / step) * step;
    const double above = std::ceil(limit / step) * step;
    if (below == above) return below;
    if (!(below > 0.0)) return above;
    return freeze_profit(params, below, euler) >= freeze_profit(params, above, euler) ? below : above;
}

std::vector<GridCell> limit_grid(const std::vector<double>& arrival_rates,
                                 const std::vector<double>& mean_marks,
                                 const SolverOptions& options) {
    std::vector<GridCell> cells;
    cells.reserve(arrival_rates.size() * mean_marks.size());
    for (double rate : arrival_rates) {
        for (double mean : mean_marks) {
            GridCell cell;
            cell.arrival_rate = rate;
            cell.mean_mark = mean;
            try {
                auto base = compound_poisson_params(
                    rate, DistributionSpec::exponential(1.0 / mean, DistRole::Mark));
                auto params = base.with_limit_set(0.0, 10.0 * base.expected_spend());
                cell.freeze = optimal_limit_freeze(params, options);
                cell.newsvendor = newsvendor_limit(params, options);
                cell.ok = cell.freeze.status == SolveStatus::Interior &&
                          cell.newsvendor.status == SolveStatus::Interior;
                if (!cell.ok) cell.error = "boundary optimum";
            } catch (const Error& e) {
                cell.error = e.what();
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace translim
