#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "swapdp/demand_model.hpp"
#include "swapdp/types.hpp"

namespace swapdp {

/**
 * Core transition and reward laws of the two-class scheduling/allocation MDP.
 *
 * Service order within an epoch is fixed: each class is first served by
 * batteries at its own charge level, then leftover level-2 batteries cover
 * residual class-1 demand ("lowest capable available charge level"). Batteries
 * that enter recharge at epoch t cannot fly at t; a level-2 battery flying a
 * class-1 mission lands with a level-1 charge, all other missions drain the
 * battery to empty. Unmet demand is dropped, never backlogged.
 *
 * All functions here are pure and the types are immutable values, so
 * everything is safe for unrestricted parallel use.
 */

bool action_feasible(State s, Action a, const ModelConfig& cfg);
void require_feasible(State s, Action a, const ModelConfig& cfg);

/**
 * All feasible recharge actions for state s: a01 + a02 bounded by the empty
 * count M - s1 - s2 and a12 bounded by s1. Returned in lexicographic
 * (a01, a02, a12) order; the count is (e+1)(e+2)/2 * (s1+1) for e empties.
 */
std::vector<Action> feasible_actions(State s, const ModelConfig& cfg);

/// Battery counts at levels 1/2 after same-level service only.
IntermediateState intermediate_state(State s, Action a, Demand d, const ModelConfig& cfg);

/// Full transition: same-level service, then level-2 spillover to class 1.
TransitionOutcome next_state(State s, Action a, Demand d, const ModelConfig& cfg);

/// Weighted met demand of one realized transition.
double realized_reward(State s, Action a, const TransitionOutcome& outcome,
                       const ModelConfig& cfg);

/// Value of leftover charge at the end of the horizon: rho11*s1 + rho22*s2.
double terminal_reward(State s, const ModelConfig& cfg);

/**
 * Closed-form transition law, streamed.
 *
 * Invokes fn(next, probability, met_c1_lvl1, met_c1_lvl2, met_c2_lvl2) once
 * per demand region with its aggregate probability, a product of one pmf/tail
 * factor per class. The five regions partition the demand support:
 *
 *   1. both classes fully served from same-level stock (pmf x pmf);
 *   2. class 1 fully served, class-2 demand at or above stock (pmf x tail);
 *   3. both demands at or above stock, no leftovers (tail x tail);
 *   4. class-1 overflow absorbed by part of the level-2 leftovers (pmf x pmf);
 *   5. class-1 overflow consumes every level-2 leftover (tail x pmf).
 *
 * Distinct regions can land on the same next state (a partially-served path
 * and a spillover path may coincide), so per-state probabilities accumulate
 * across emissions.
 */
template <class F>
void for_each_outcome(State s, Action a, const EpochDemandDistribution& dist1,
                      const EpochDemandDistribution& dist2, const ModelConfig& cfg, F&& fn) {
    require_feasible(s, a, cfg);

    const int flyable1 = s.s1 - a.a12;       // level-1 batteries able to serve this epoch
    const int floor1 = a.a01;                // level-1 count when class-1 demand >= flyable1
    const int top1 = floor1 + flyable1;      // level-1 count under zero class-1 demand
    const int floor2 = a.a02 + a.a12;        // level-2 count when class-2 demand >= s2
    const int top2 = s.s2 + floor2;          // level-2 count under zero class-2 demand

    const int last1 = std::min(flyable1 - 1, dist1.d_max());
    const int last2 = std::min(s.s2 - 1, dist2.d_max());

    for (int d1 = 0; d1 <= last1; ++d1) {
        const double p1 = dist1.pmf(d1);
        for (int d2 = 0; d2 <= last2; ++d2)
            fn(State{top1 - d1, top2 - d2}, p1 * dist2.pmf(d2), d1, 0, d2);
        fn(State{top1 - d1, floor2}, p1 * dist2.tail_or_zero(s.s2), d1, 0, s.s2);
    }

    fn(State{floor1, floor2}, dist1.tail_or_zero(flyable1) * dist2.tail_or_zero(s.s2), flyable1,
       0, s.s2);

    for (int d2 = 0; d2 <= last2; ++d2) {
        const double p2 = dist2.pmf(d2);
        const int leftover = s.s2 - d2;
        for (int spill = 0; spill < leftover; ++spill) {
            if (flyable1 + spill > dist1.d_max()) break;
            fn(State{floor1 + spill, top2 - d2 - spill}, dist1.pmf(flyable1 + spill) * p2,
               flyable1, spill, d2);
        }
        fn(State{floor1 + leftover, floor2}, dist1.tail_or_zero(flyable1 + leftover) * p2,
           flyable1, leftover, d2);
    }
}

/**
 * Transition distribution as an ordered state->probability map over reachable
 * states. Probabilities sum to 1 up to rounding (checked internally).
 */
std::map<State, double> transition_distribution(State s, Action a,
                                                const EpochDemandDistribution& dist1,
                                                const EpochDemandDistribution& dist2,
                                                const ModelConfig& cfg);

/// Expected one-epoch reward of (s, a) under the truncated demand law.
double expected_reward(State s, Action a, const EpochDemandDistribution& dist1,
                       const EpochDemandDistribution& dist2, const ModelConfig& cfg);

/**
 * One-step lookahead value: expected reward plus the probability-weighted
 * continuation read from next_values (indexed by space). This is the inner
 * term of the optimality recursion and of fixed-policy evaluation.
 */
double action_value(State s, Action a, const EpochDemandDistribution& dist1,
                    const EpochDemandDistribution& dist2, const ModelConfig& cfg,
                    std::span<const double> next_values, const StateSpace& space);

}  // namespace swapdp
