#include "swapdp/solver_exact.hpp"

#include <omp.h>

#include <tuple>

namespace swapdp {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return omp_get_max_threads();
}

bool action_improves(double score, Action a, double best_score, Action best) {
    if (score != best_score) return score > best_score;
    return std::tuple(a.a02, a.a12, a.a01) > std::tuple(best.a02, best.a12, best.a01);
}

Action benchmark_action(State s, const ModelConfig& cfg) {
    require_valid_state(s, cfg);
    return Action{0, cfg.fleet_size - s.s1 - s.s2, 0};
}

namespace {

void check_capacity(const Scenario& scenario, const SolveOptions& options) {
    const int m = scenario.model.fleet_size;
    if (m > options.max_fleet_exact)
        throw capacity_error("fleet size " + std::to_string(m) + " exceeds the exact-solve guard " +
                             std::to_string(options.max_fleet_exact) +
                             " (state space would hold " +
                             std::to_string((m + 1) * (m + 2) / 2) +
                             " states per epoch); use the rl solver");
}

struct SweepContext {
    const Scenario& scenario;
    const StateSpace space;
    std::vector<std::vector<Action>> actions;  // per state index

    explicit SweepContext(const Scenario& sc)
        : scenario(sc), space(sc.model.fleet_size) {
        actions.resize(space.size());
        for (int i = 0; i < space.size(); ++i)
            actions[i] = feasible_actions(space.state(i), sc.model);
    }
};

template <class PickAction>
void sweep_backwards(const SweepContext& ctx, int threads, ValueTable& value,
                     PickAction&& pick) {
    const auto& sc = ctx.scenario;
    const int nstates = ctx.space.size();

    for (int i = 0; i < nstates; ++i)
        value.at(sc.model.horizon, i) = terminal_reward(ctx.space.state(i), sc.model);

    for (int t = sc.model.horizon - 1; t >= 1; --t) {
        const auto& dist1 = sc.schedule.dist(1, t);
        const auto& dist2 = sc.schedule.dist(2, t);
        const auto next_values = value.slice(t + 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int i = 0; i < nstates; ++i)
            value.at(t, i) = pick(t, i, dist1, dist2, next_values);
    }
}

}  // namespace

ExactSolution backward_induction(const Scenario& scenario, const SolveOptions& options) {
    scenario.model.validate();
    check_capacity(scenario, options);
    const int threads = resolve_threads(options.threads);

    SweepContext ctx(scenario);
    const int nstates = ctx.space.size();
    const std::uint64_t hash = scenario.hash();

    ExactSolution sol;
    sol.value = ValueTable{scenario.model.fleet_size, scenario.model.horizon,
                           std::vector<double>(static_cast<std::size_t>(scenario.model.horizon) *
                                               nstates),
                           hash, "bi"};
    sol.policy = PolicyTable{scenario.model.fleet_size, scenario.model.horizon,
                             std::vector<Action>(static_cast<std::size_t>(scenario.model.horizon -
                                                                          1) *
                                                 nstates),
                             hash, "bi"};

    sweep_backwards(ctx, threads, sol.value,
                    [&](int t, int i, const EpochDemandDistribution& d1,
                        const EpochDemandDistribution& d2, std::span<const double> next) {
                        const State s = ctx.space.state(i);
                        Action best{};
                        double best_q = -1.0;
                        bool first = true;
                        for (const Action a : ctx.actions[i]) {
                            const double q =
                                action_value(s, a, d1, d2, ctx.scenario.model, next, ctx.space);
                            if (first || action_improves(q, a, best_q, best)) {
                                best = a;
                                best_q = q;
                                first = false;
                            }
                        }
                        sol.policy.at(t, i) = best;
                        return best_q;
                    });
    return sol;
}

ExactSolution backward_induction_reference(const Scenario& scenario,
                                           const SolveOptions& options) {
    scenario.model.validate();
    check_capacity(scenario, options);

    const StateSpace space(scenario.model.fleet_size);
    const int nstates = space.size();
    const int horizon = scenario.model.horizon;
    const std::uint64_t hash = scenario.hash();

    ExactSolution sol;
    sol.value = ValueTable{scenario.model.fleet_size, horizon,
                           std::vector<double>(static_cast<std::size_t>(horizon) * nstates), hash,
                           "bi-reference"};
    sol.policy = PolicyTable{scenario.model.fleet_size, horizon,
                             std::vector<Action>(static_cast<std::size_t>(horizon - 1) * nstates),
                             hash, "bi-reference"};

    for (int i = 0; i < nstates; ++i)
        sol.value.at(horizon, i) = terminal_reward(space.state(i), scenario.model);

    for (int t = horizon - 1; t >= 1; --t) {
        const auto& dist1 = scenario.schedule.dist(1, t);
        const auto& dist2 = scenario.schedule.dist(2, t);
        for (int i = 0; i < nstates; ++i) {
            const State s = space.state(i);
            Action best{};
            double best_q = 0.0;
            bool first = true;
            for (const Action a : feasible_actions(s, scenario.model)) {
                double q = expected_reward(s, a, dist1, dist2, scenario.model);
                for (const auto& [j, p] : transition_distribution(s, a, dist1, dist2,
                                                                  scenario.model))
                    q += p * sol.value.at(t + 1, space.index(j));
                if (first || action_improves(q, a, best_q, best)) {
                    best = a;
                    best_q = q;
                    first = false;
                }
            }
            sol.policy.at(t, i) = best;
            sol.value.at(t, i) = best_q;
        }
    }
    return sol;
}

ValueTable evaluate_fixed_policy(const Scenario& scenario,
                                 const std::function<Action(int, State)>& policy,
                                 const SolveOptions& options) {
    scenario.model.validate();
    check_capacity(scenario, options);
    const int threads = resolve_threads(options.threads);

    SweepContext ctx(scenario);
    ValueTable value{scenario.model.fleet_size, scenario.model.horizon,
                     std::vector<double>(static_cast<std::size_t>(scenario.model.horizon) *
                                         ctx.space.size()),
                     scenario.hash(), "policy-eval"};

    sweep_backwards(ctx, threads, value,
                    [&](int t, int i, const EpochDemandDistribution& d1,
                        const EpochDemandDistribution& d2, std::span<const double> next) {
                        const State s = ctx.space.state(i);
                        const Action a = policy(t, s);
                        require_feasible(s, a, ctx.scenario.model);
                        return action_value(s, a, d1, d2, ctx.scenario.model, next, ctx.space);
                    });
    return value;
}

}  // namespace swapdp
