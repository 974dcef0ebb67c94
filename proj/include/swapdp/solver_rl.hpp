#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swapdp/rng.hpp"
#include "swapdp/scenario.hpp"
#include "swapdp/solver_exact.hpp"

namespace swapdp {

struct EpsilonSchedule {
    enum class Kind { reciprocal, constant };
    Kind kind = Kind::reciprocal;
    double value = 1.0;  // constant schedules only; must lie in (0,1]
};

/// Exploration rate at iteration n (n >= 1); the reciprocal schedule is 1/n.
double epsilon_at(std::uint64_t n, const EpsilonSchedule& schedule);

struct StepsizeRule {
    enum class Kind { harmonic, adaptive_bakf };
    Kind kind = Kind::adaptive_bakf;
    double harmonic_a = 20.0;  // alpha_n = a / (a + n - 1)
    double bakf_eta0 = 10.0;   // inner rate eta_n = eta0 / (eta0 + n - 1)
    double bakf_floor = 0.05;  // lower bound on late-iteration smoothing
};

/// Per-entry auxiliaries for the adaptive rule; value-initialized per (t, s).
struct StepsizeState {
    std::uint64_t n = 0;
    double bias = 0.0;     // smoothed innovation
    double meansq = 0.0;   // smoothed squared innovation
    double lambda = 0.0;   // variance-of-estimate tracker
};

/**
 * Next smoothing weight for one table entry. The harmonic rule depends only on
 * the visit count. The adaptive rule tracks the innovation
 * observation - current_estimate to separate noise variance from bias and
 * returns 1 - noise_var/total_var, floored at bakf_floor; the first visit
 * always returns 1 so the estimate starts at the first observation.
 */
double stepsize_next(StepsizeState& state, double observation, double current_estimate,
                     const StepsizeRule& rule);

/// Smoothed value (1-alpha)*previous + alpha*observed.
double smooth_update(double previous, double observed, double alpha);

struct RLConfig {
    std::uint64_t tau1 = 200000;  // core iterations
    int tau2 = 30;                // demand samples per action scoring
    EpsilonSchedule epsilon{};
    StepsizeRule stepsize{};
    std::uint64_t seed = 1;
    enum class InitialStateRule { fixed_scenario, uniform_random };
    InitialStateRule initial_state_rule = InitialStateRule::fixed_scenario;
    std::uint64_t trace_every = 100;

    void validate() const;
    std::string to_json() const;
    static RLConfig from_json(const std::string& text);
};

/**
 * Lookup-table value estimates learned by the descending epsilon-greedy
 * method. The terminal slice holds the terminal reward and is never updated.
 */
struct ApproxValueTable {
    int fleet = 0;
    int horizon = 2;
    std::vector<double> vbar;           // horizon * nstates
    std::vector<std::uint64_t> visits;  // (horizon-1) * nstates
    std::vector<std::pair<std::uint64_t, double>> trace;  // (iteration, vbar_1(s1))
    std::uint64_t scenario_hash = 0;
    std::string extraction_method;  // filled by greedy_policy

    int nstates() const { return (fleet + 1) * (fleet + 2) / 2; }
    double at(int t, int state_index) const { return vbar[(t - 1) * nstates() + state_index]; }
    double& at(int t, int state_index) { return vbar[(t - 1) * nstates() + state_index]; }
    std::uint64_t visits_at(int t, int state_index) const {
        return visits[(t - 1) * nstates() + state_index];
    }
};

/**
 * Greedy action at (t, s): draws tau2 demand samples (shared across actions)
 * and scores each feasible action by the sample mean of realized reward plus
 * the next-state estimate; ties break like the exact solver. Returns the
 * argmax and its score.
 */
std::pair<Action, double> select_action(const ApproxValueTable& values, State s, int t,
                                        const DemandSchedule& schedule, const ModelConfig& cfg,
                                        int tau2, Rng& rng);

/**
 * Runs the learning loop: per iteration from the initial state, walk forward
 * through the horizon, exploring a random feasible action with probability
 * epsilon_n and otherwise exploiting via select_action; smooth the observed
 * value into the table and step to the sampled next state. Deterministic for
 * a fixed seed. Exploration observations are smoothed with the same stepsize
 * stream as exploitation observations.
 */
ApproxValueTable train(const Scenario& scenario, const RLConfig& config);

/**
 * One-step greedy policy of a learned table. Scores actions by the exact
 * expectation under the truncated demand law when the fleet is within the
 * exact-solve guard, otherwise by tau2-sample scoring with a seed derived from
 * config.seed; the method used is recorded on the table.
 */
PolicyTable greedy_policy(const Scenario& scenario, ApproxValueTable& values,
                          const RLConfig& config, const SolveOptions& options = {});

}  // namespace swapdp
