#pragma once

// Test-only reference computations. Everything here is deliberately brute
// force: transition laws by enumerating the truncated demand support point by
// point, optima by enumerating whole policies. The library must match these,
// not the other way around.

#include <cmath>
#include <map>
#include <vector>

#include "swapdp/mdp_core.hpp"
#include "swapdp/scenario.hpp"

namespace swapdp::testing {

/// Transition law by full demand enumeration: apply next_state to every
/// (d1, d2) in the truncated support and accumulate pmf products.
inline std::map<State, double> enum_transition_distribution(
    State s, Action a, const EpochDemandDistribution& dist1,
    const EpochDemandDistribution& dist2, const ModelConfig& cfg) {
    std::map<State, double> out;
    for (int d1 = 0; d1 <= dist1.d_max(); ++d1)
        for (int d2 = 0; d2 <= dist2.d_max(); ++d2) {
            const TransitionOutcome o = next_state(s, a, Demand{d1, d2}, cfg);
            out[o.next] += dist1.pmf(d1) * dist2.pmf(d2);
        }
    return out;
}

/// Expected one-epoch reward by the same enumeration.
inline double enum_expected_reward(State s, Action a, const EpochDemandDistribution& dist1,
                                   const EpochDemandDistribution& dist2,
                                   const ModelConfig& cfg) {
    double acc = 0.0;
    for (int d1 = 0; d1 <= dist1.d_max(); ++d1)
        for (int d2 = 0; d2 <= dist2.d_max(); ++d2) {
            const TransitionOutcome o = next_state(s, a, Demand{d1, d2}, cfg);
            acc += dist1.pmf(d1) * dist2.pmf(d2) * realized_reward(s, a, o, cfg);
        }
    return acc;
}

/// One-step backup of a single action against given next-epoch values,
/// computed purely from the enumeration above.
inline double enum_action_value(State s, Action a, const EpochDemandDistribution& dist1,
                                const EpochDemandDistribution& dist2, const ModelConfig& cfg,
                                const std::vector<double>& next_values,
                                const StateSpace& space) {
    double acc = enum_expected_reward(s, a, dist1, dist2, cfg);
    for (const auto& [j, p] : enum_transition_distribution(s, a, dist1, dist2, cfg))
        acc += p * next_values[space.index(j)];
    return acc;
}

/**
 * Optimal values at every state by exhaustive enumeration of deterministic
 * Markov policies: every (epoch-1 rule, epoch-2 rule) pair is evaluated and
 * the elementwise maximum taken. Per-(state, action) one-step rewards and
 * transition laws are tabulated once via demand enumeration; only usable for
 * tiny instances (intended: M = 2, N = 3).
 */
inline std::vector<double> enum_optimal_values(const Scenario& scenario) {
    const ModelConfig& cfg = scenario.model;
    const StateSpace space(cfg.fleet_size);
    const int nstates = space.size();
    if (cfg.horizon != 3) throw std::logic_error("policy enumeration oracle expects N = 3");

    std::vector<std::vector<Action>> actions(nstates);
    for (int i = 0; i < nstates; ++i) actions[i] = feasible_actions(space.state(i), cfg);

    std::vector<double> terminal(nstates);
    for (int i = 0; i < nstates; ++i) terminal[i] = terminal_reward(space.state(i), cfg);

    // One-step reward and transition rows per (epoch, state, action index).
    struct Step {
        double reward;
        std::vector<std::pair<int, double>> to;  // (state index, probability)
    };
    std::vector<std::vector<std::vector<Step>>> step(3);
    for (int t = 1; t <= 2; ++t) {
        const auto& d1 = scenario.schedule.dist(1, t);
        const auto& d2 = scenario.schedule.dist(2, t);
        step[t].resize(nstates);
        for (int i = 0; i < nstates; ++i) {
            const State s = space.state(i);
            for (const Action a : actions[i]) {
                Step st;
                st.reward = enum_expected_reward(s, a, d1, d2, cfg);
                for (const auto& [j, p] : enum_transition_distribution(s, a, d1, d2, cfg))
                    st.to.emplace_back(space.index(j), p);
                step[t][i].push_back(std::move(st));
            }
        }
    }

    // All decision rules for one epoch, as per-state action indices.
    std::vector<std::vector<std::size_t>> rules;
    {
        std::vector<std::size_t> pick(nstates, 0);
        for (;;) {
            rules.push_back(pick);
            int i = 0;
            while (i < nstates && ++pick[i] == actions[i].size()) pick[i++] = 0;
            if (i == nstates) break;
        }
    }

    const auto rule_values = [&](const std::vector<std::size_t>& rule, int t,
                                 const std::vector<double>& next) {
        std::vector<double> v(nstates);
        for (int i = 0; i < nstates; ++i) {
            const Step& st = step[t][i][rule[i]];
            double acc = st.reward;
            for (const auto& [j, p] : st.to) acc += p * next[j];
            v[i] = acc;
        }
        return v;
    };

    std::vector<double> best(nstates, -1.0);
    for (const auto& rule2 : rules) {
        const std::vector<double> v2 = rule_values(rule2, 2, terminal);
        for (const auto& rule1 : rules) {
            const std::vector<double> v1 = rule_values(rule1, 1, v2);
            for (int i = 0; i < nstates; ++i) best[i] = std::max(best[i], v1[i]);
        }
    }
    return best;
}

/// Sample mean and standard error.
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSE mean_se(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = xs.size() > 1 ? ss / (xs.size() - 1) : 0.0;
    return {mean, std::sqrt(var / xs.size())};
}

/// Upper chi-square quantile via the Wilson-Hilferty cube approximation;
/// plenty for a coarse goodness-of-fit gate.
inline double chi_square_critical(int dof, double z_upper) {
    const double k = dof;
    const double term = 1.0 - 2.0 / (9.0 * k) + z_upper * std::sqrt(2.0 / (9.0 * k));
    return k * term * term * term;
}

}  // namespace swapdp::testing
