#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swapdp/mdp_core.hpp"
#include "swapdp/scenario.hpp"

namespace swapdp {

/**
 * Dense value function V(t, s) for t = 1..N over the triangular state space.
 * The terminal slice always holds the terminal reward.
 */
struct ValueTable {
    int fleet = 0;
    int horizon = 2;
    std::vector<double> v;  // horizon * nstates, slice t at (t-1)*nstates
    std::uint64_t scenario_hash = 0;
    std::string solver_id;

    int nstates() const { return (fleet + 1) * (fleet + 2) / 2; }
    double at(int t, int state_index) const { return v[(t - 1) * nstates() + state_index]; }
    double& at(int t, int state_index) { return v[(t - 1) * nstates() + state_index]; }
    std::span<const double> slice(int t) const {
        return std::span<const double>(v).subspan((t - 1) * nstates(), nstates());
    }
};

/// Decision rule d(t, s) for t = 1..N-1; every stored action is feasible.
struct PolicyTable {
    int fleet = 0;
    int horizon = 2;
    std::vector<Action> d;  // (horizon-1) * nstates
    std::uint64_t scenario_hash = 0;
    std::string solver_id;

    int nstates() const { return (fleet + 1) * (fleet + 2) / 2; }
    Action at(int t, int state_index) const { return d[(t - 1) * nstates() + state_index]; }
    Action& at(int t, int state_index) { return d[(t - 1) * nstates() + state_index]; }
};

struct SolveOptions {
    int threads = 0;           // 0 = all available
    int max_fleet_exact = 24;  // refuse larger instances instead of thrashing
};

struct ExactSolution {
    ValueTable value;
    PolicyTable policy;
};

/// True when a scores at least as high; equal scores prefer the action with
/// the lexicographically greatest (a02, a12, a01), making argmax deterministic.
bool action_improves(double score, Action a, double best_score, Action best);

/**
 * Optimal values and policy by backward induction over the full state space.
 * States within one epoch sweep are independent and processed in parallel;
 * results are identical for every thread count. Throws capacity_error when the
 * fleet exceeds options.max_fleet_exact.
 */
ExactSolution backward_induction(const Scenario& scenario, const SolveOptions& options = {});

/**
 * Single-threaded reference solve kept for tests and the benchmark target.
 * Each backup is assembled from the materialized transition map plus the
 * expected one-epoch reward instead of the streamed kernel, so it exercises an
 * independent summation route; agreement with backward_induction is checked to
 * tight tolerance rather than bitwise.
 */
ExactSolution backward_induction_reference(const Scenario& scenario,
                                           const SolveOptions& options = {});

/**
 * Exact value of a fixed decision rule: the same recursion with the maximum
 * replaced by the rule's action. policy(t, s) must be feasible at every state.
 */
ValueTable evaluate_fixed_policy(const Scenario& scenario,
                                 const std::function<Action(int, State)>& policy,
                                 const SolveOptions& options = {});

/// Recharge every empty battery to full, everywhere and always.
Action benchmark_action(State s, const ModelConfig& cfg);

int resolve_threads(int requested);

}  // namespace swapdp
