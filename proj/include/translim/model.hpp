#pragma once

#include "translim/distribution.hpp"
#include "translim/inversion.hpp"
#include "translim/policy.hpp"

namespace translim {

struct BalanceQuery {
    ModelParams params;
    double limit;
    double horizon;
};

// Query at the parameters' own effective horizon.
BalanceQuery make_query(const ModelParams& params, double limit);

// E[B_l(T)] under the freeze policy, in [0, l].
double expected_balance(const BalanceQuery& q, const EulerConfig& euler = {});

// dE[B_l(T)]/dl, inverted from its own transform; in [0, 1].
double balance_derivative(const BalanceQuery& q, const EulerConfig& euler = {});

// P(A(T) > l): the chance that some purchase in the period is declined.
double decline_probability(const BalanceQuery& q, const EulerConfig& euler = {});

// E[min(A(T), l)], the newsvendor balance.
double expected_min(const BalanceQuery& q, const EulerConfig& euler = {});

// gamma * E[balance] - nu * l for Freeze or NewsvendorTruncation. Retrial has
// no closed form and raises UnsupportedPolicyForAnalytic.
double expected_profit(const BalanceQuery& q, PolicyKind policy, const EulerConfig& euler = {});

}  // namespace translim
