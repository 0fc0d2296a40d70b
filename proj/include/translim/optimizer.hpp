#pragma once

#include <string>
#include <vector>

#include "translim/distribution.hpp"
#include "translim/inversion.hpp"

namespace translim {

enum class SolveStatus { Interior, LowerBoundary, UpperBoundary };

std::string_view to_string(SolveStatus status) noexcept;

struct SolverOptions {
    double bracket_tol = 1e-6;  // dollars
    int max_iterations = 200;
    int prescan_points = 32;
    EulerConfig euler{};
};

struct OptimizationResult {
    double limit_star = 0.0;
    double profit_at_star = 0.0;
    double decline_prob_at_star = 0.0;
    int iterations = 0;
    // |first-order condition| at limit_star; absolute distance of the decline
    // probability from the critical level for the newsvendor solve.
    double residual = 0.0;
    SolveStatus status = SolveStatus::Interior;
    bool fallback_used = false;
    std::string warning;
};

struct BoundsResult {
    double lower = 0.0;  // newsvendor limit
    double upper = 0.0;  // freeze-policy limit
    double gap = 0.0;
    OptimizationResult newsvendor;
    OptimizationResult freeze;
};

struct LimitReport {
    double limit = 0.0;
    double expected_balance = 0.0;
    double expected_min = 0.0;
    double expected_profit = 0.0;             // freeze policy
    double expected_profit_truncation = 0.0;  // newsvendor policy
    double decline_prob = 0.0;
};

// Maximizes gamma E[B_l(T)] - nu l over the limit set by bisection on the
// first-order condition dE[B_l(T)]/dl = nu/gamma. The derivative climbs from
// 0 to a single peak and then decays; the pre-scan checks that shape and
// brackets the descending crossing. A scan with several peaks switches to a
// golden-section search on the profit and sets fallback_used. When the
// condition has no descending root in the limit set, or the root is beaten
// by the lower end point, the better end point is returned with a boundary
// status and a warning.
OptimizationResult optimal_limit_freeze(const ModelParams& params, const SolverOptions& options = {});

// Newsvendor quantile: the smallest l with P(A(T) > l) <= nu/gamma. Throws
// RatioUnattainable when even P(A(T) > 0) is below nu/gamma.
OptimizationResult newsvendor_limit(const ModelParams& params, const SolverOptions& options = {});

// [newsvendor limit, freeze limit], which brackets the retrial-policy optimum.
BoundsResult retrial_bounds(const ModelParams& params, const SolverOptions& options = {});

LimitReport evaluate_limit(const ModelParams& params, double limit, const EulerConfig& euler = {});

// The multiple of `step` next to `limit` (below or above) with the higher
// freeze-policy profit.
double revised_limit(const ModelParams& params, double limit, double step = 500.0,
                     const EulerConfig& euler = {});

// One cell of a (purchase rate x mean purchase) sweep of exponential-mark
// compound Poisson accounts.
struct GridCell {
    double arrival_rate = 0.0;
    double mean_mark = 0.0;
    OptimizationResult freeze;
    OptimizationResult newsvendor;
    bool ok = false;
    std::string error;
};

// Sweeps the grid at the default economics. The limit set of each cell is
// (0, 10 E[A(T)]] so that large-spend cells stay interior.
std::vector<GridCell> limit_grid(const std::vector<double>& arrival_rates,
                                 const std::vector<double>& mean_marks,
                                 const SolverOptions& options = {});

}  // namespace translim
