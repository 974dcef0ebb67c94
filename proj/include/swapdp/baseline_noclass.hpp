#pragma once

#include <cstdint>
#include <vector>

#include "swapdp/scenario.hpp"

namespace swapdp {

/**
 * Classification-free baseline: batteries are either full or empty, any full
 * battery serves any request, and every mission drains the battery completely.
 * Demand per epoch is the class-aggregate Poisson rate. Used to quantify what
 * distance-based classification buys.
 */

/// State update rule: served = min(s, demand); s' = s + recharge - served.
/// Batteries sent to recharge become usable at the next epoch.
int flat_next_state(int charged, int recharge, int demand, int& served);

/// V(t, s) over s = 0..M; terminal slice values each full battery at 1.
struct FlatValueTable {
    int fleet = 0;
    int horizon = 2;
    std::vector<double> v;  // horizon * (fleet+1)
    std::uint64_t scenario_hash = 0;

    double at(int t, int charged) const { return v[(t - 1) * (fleet + 1) + charged]; }
    double& at(int t, int charged) { return v[(t - 1) * (fleet + 1) + charged]; }
};

/// Recharge counts d(t, s); always within 0..M-s.
struct FlatPolicyTable {
    int fleet = 0;
    int horizon = 2;
    std::vector<int> recharge;  // (horizon-1) * (fleet+1)
    std::uint64_t scenario_hash = 0;

    int at(int t, int charged) const { return recharge[(t - 1) * (fleet + 1) + charged]; }
    int& at(int t, int charged) { return recharge[(t - 1) * (fleet + 1) + charged]; }
};

struct FlatSolution {
    FlatValueTable value;
    FlatPolicyTable policy;
};

/**
 * Exact optimum of the flat model with reward 1 per served flight and 1 per
 * terminal full battery. The aggregate demand law is Poisson with rate
 * lambda1_t + lambda2_t on the scenario's shared truncated support.
 */
FlatSolution flat_backward_induction(const Scenario& scenario);

/// Aggregate-demand distribution at epoch t (shared truncation rule).
EpochDemandDistribution flat_demand(const Scenario& scenario, int t);

}  // namespace swapdp
