#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "translim/distribution.hpp"
#include "translim/policy.hpp"

namespace translim {

struct SimReport {
    PolicyKind policy = PolicyKind::Freeze;
    double limit = 0.0;
    double mean_balance = 0.0;
    double std_err = 0.0;  // sample sd / sqrt(replications)
    double decline_frequency = 0.0;
    // Mean of l - balance over paths with a declined purchase; 0 if none.
    double mean_undershoot_given_exceed = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t seed = 0;
};

// End-of-period balances of one simulated period under every policy. All
// three see the same attempted purchases.
struct PathOutcome {
    double attempted = 0.0;  // A(T)
    double freeze = 0.0;
    double retrial = 0.0;
    double truncation = 0.0;  // min(A(T), l)
    bool exceeded = false;    // A(T) > l
};

// Replication r always draws from Philox stream r under key `seed`, so a
// given (params, seed, r) yields the same purchases for every policy, every
// limit and every thread count.
std::vector<PathOutcome> simulate_paths(const ModelParams& params, double limit,
                                        std::uint64_t replications, std::uint64_t seed);

SimReport simulate_policy(const ModelParams& params, double limit, PolicyKind policy,
                          std::uint64_t replications, std::uint64_t seed);

// Empirical P(A(T) > l).
double simulate_aggregate_tail(const ModelParams& params, double limit,
                               std::uint64_t replications, std::uint64_t seed);

struct RetrialPoint {
    double limit = 0.0;
    double mean_balance = 0.0;
    double std_err = 0.0;
    double profit = 0.0;
};

// Retrial-policy balance and profit at each grid limit on common paths.
std::vector<RetrialPoint> retrial_profit_curve(const ModelParams& params,
                                               std::span<const double> grid,
                                               std::uint64_t replications, std::uint64_t seed);

// Grid point with the largest simulated retrial-policy profit.
double estimate_retrial_optimum(const ModelParams& params, std::span<const double> grid,
                                std::uint64_t replications, std::uint64_t seed);

// Worker threads used by the simulator (defaults to the hardware count).
// Results do not depend on this setting.
void set_simulation_threads(unsigned threads) noexcept;

}  // namespace translim
