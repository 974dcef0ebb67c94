#include "swapdp/solver_rl.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace swapdp {

using nlohmann::json;

double epsilon_at(std::uint64_t n, const EpsilonSchedule& schedule) {
    if (n < 1) throw validation_error("iteration index must be >= 1");
    switch (schedule.kind) {
        case EpsilonSchedule::Kind::reciprocal:
            return 1.0 / static_cast<double>(n);
        case EpsilonSchedule::Kind::constant:
            return schedule.value;
    }
    return 1.0;
}

double stepsize_next(StepsizeState& state, double observation, double current_estimate,
                     const StepsizeRule& rule) {
    ++state.n;
    if (rule.kind == StepsizeRule::Kind::harmonic)
        return rule.harmonic_a / (rule.harmonic_a + static_cast<double>(state.n) - 1.0);

    const double innovation = observation - current_estimate;
    const double eta = rule.bakf_eta0 / (rule.bakf_eta0 + static_cast<double>(state.n) - 1.0);
    const double prev_lambda = state.lambda;
    state.bias = (1.0 - eta) * state.bias + eta * innovation;
    state.meansq = (1.0 - eta) * state.meansq + eta * innovation * innovation;

    double alpha;
    if (state.n == 1) {
        alpha = 1.0;
    } else if (state.meansq <= 1e-300) {
        // Degenerate (noise-free constant) stream: nothing to estimate, floor.
        alpha = rule.bakf_floor;
    } else {
        const double noise_var =
            (state.meansq - state.bias * state.bias) / (1.0 + prev_lambda);
        alpha = 1.0 - noise_var / state.meansq;
        alpha = std::clamp(alpha, rule.bakf_floor, 1.0);
    }
    state.lambda = alpha * alpha + (1.0 - alpha) * (1.0 - alpha) * prev_lambda;
    return alpha;
}

double smooth_update(double previous, double observed, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw validation_error("stepsize must lie in [0,1]");
    return (1.0 - alpha) * previous + alpha * observed;
}

void RLConfig::validate() const {
    if (tau1 < 1) throw validation_error("rl: tau1 must be >= 1");
    if (tau2 < 1) throw validation_error("rl: tau2 must be >= 1");
    if (epsilon.kind == EpsilonSchedule::Kind::constant &&
        !(epsilon.value > 0.0 && epsilon.value <= 1.0))
        throw validation_error("rl: constant exploration rate must lie in (0,1]");
    if (stepsize.kind == StepsizeRule::Kind::harmonic && stepsize.harmonic_a <= 0)
        throw validation_error("rl: harmonic stepsize parameter must be > 0");
    if (stepsize.kind == StepsizeRule::Kind::adaptive_bakf &&
        !(stepsize.bakf_floor >= 0 && stepsize.bakf_floor <= 1 && stepsize.bakf_eta0 > 0))
        throw validation_error("rl: adaptive stepsize parameters out of range");
    if (trace_every < 1) throw validation_error("rl: trace_every must be >= 1");
}

std::string RLConfig::to_json() const {
    json j;
    j["tau1"] = tau1;
    j["tau2"] = tau2;
    j["epsilon"] = {{"kind", epsilon.kind == EpsilonSchedule::Kind::reciprocal ? "reciprocal"
                                                                               : "constant"},
                    {"value", epsilon.value}};
    json st;
    st["kind"] = stepsize.kind == StepsizeRule::Kind::harmonic ? "harmonic" : "adaptive_bakf";
    st["harmonic_a"] = stepsize.harmonic_a;
    st["eta0"] = stepsize.bakf_eta0;
    st["floor"] = stepsize.bakf_floor;
    j["stepsize"] = st;
    j["seed"] = seed;
    j["initial_state_rule"] =
        initial_state_rule == InitialStateRule::fixed_scenario ? "fixed_scenario"
                                                               : "uniform_random";
    j["trace_every"] = trace_every;
    return j.dump(2) + "\n";
}

RLConfig RLConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("rl config: invalid JSON: ") + e.what());
    }
    RLConfig c;
    try {
        c.tau1 = j.value("tau1", c.tau1);
        c.tau2 = j.value("tau2", c.tau2);
        if (j.contains("epsilon")) {
            const auto& e = j.at("epsilon");
            const std::string kind = e.value("kind", "reciprocal");
            if (kind == "reciprocal") {
                c.epsilon.kind = EpsilonSchedule::Kind::reciprocal;
            } else if (kind == "constant") {
                c.epsilon.kind = EpsilonSchedule::Kind::constant;
                c.epsilon.value = e.at("value").get<double>();
            } else {
                throw validation_error("rl config: unknown epsilon kind '" + kind + "'");
            }
        }
        if (j.contains("stepsize")) {
            const auto& s = j.at("stepsize");
            const std::string kind = s.value("kind", "adaptive_bakf");
            if (kind == "harmonic") {
                c.stepsize.kind = StepsizeRule::Kind::harmonic;
            } else if (kind == "adaptive_bakf") {
                c.stepsize.kind = StepsizeRule::Kind::adaptive_bakf;
            } else {
                throw validation_error("rl config: unknown stepsize kind '" + kind + "'");
            }
            c.stepsize.harmonic_a = s.value("harmonic_a", c.stepsize.harmonic_a);
            c.stepsize.bakf_eta0 = s.value("eta0", c.stepsize.bakf_eta0);
            c.stepsize.bakf_floor = s.value("floor", c.stepsize.bakf_floor);
        }
        c.seed = j.value("seed", c.seed);
        const std::string init = j.value("initial_state_rule", "fixed_scenario");
        if (init == "fixed_scenario") {
            c.initial_state_rule = RLConfig::InitialStateRule::fixed_scenario;
        } else if (init == "uniform_random") {
            c.initial_state_rule = RLConfig::InitialStateRule::uniform_random;
        } else {
            throw validation_error("rl config: unknown initial_state_rule '" + init + "'");
        }
        c.trace_every = j.value("trace_every", c.trace_every);
    } catch (const json::exception& e) {
        throw validation_error(std::string("rl config: malformed field: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

std::pair<Action, double> best_sampled_action(const ApproxValueTable& values, State s, int t,
                                              const std::vector<Action>& actions,
                                              const std::vector<Demand>& samples,
                                              const ModelConfig& cfg, const StateSpace& space) {
    Action best{};
    double best_score = 0.0;
    bool first = true;
    for (const Action a : actions) {
        double sum = 0.0;
        for (const Demand d : samples) {
            const TransitionOutcome out = next_state(s, a, d, cfg);
            sum += realized_reward(s, a, out, cfg) + values.at(t + 1, space.index(out.next));
        }
        const double score = sum / static_cast<double>(samples.size());
        if (first || action_improves(score, a, best_score, best)) {
            best = a;
            best_score = score;
            first = false;
        }
    }
    return {best, best_score};
}

std::vector<Demand> draw_samples(const DemandSchedule& schedule, int t, int tau2, Rng& rng) {
    std::vector<Demand> samples(tau2);
    for (Demand& d : samples)
        d = Demand{schedule.sample(1, t, rng), schedule.sample(2, t, rng)};
    return samples;
}

}  // namespace

std::pair<Action, double> select_action(const ApproxValueTable& values, State s, int t,
                                        const DemandSchedule& schedule, const ModelConfig& cfg,
                                        int tau2, Rng& rng) {
    if (tau2 < 1) throw validation_error("tau2 must be >= 1");
    const StateSpace space(values.fleet);
    const auto actions = feasible_actions(s, cfg);
    const auto samples = draw_samples(schedule, t, tau2, rng);
    return best_sampled_action(values, s, t, actions, samples, cfg, space);
}

ApproxValueTable train(const Scenario& scenario, const RLConfig& config) {
    scenario.model.validate();
    config.validate();

    const ModelConfig& model = scenario.model;
    const StateSpace space(model.fleet_size);
    const int nstates = space.size();
    const int horizon = model.horizon;

    std::vector<std::vector<Action>> actions(nstates);
    for (int i = 0; i < nstates; ++i) actions[i] = feasible_actions(space.state(i), model);

    ApproxValueTable av;
    av.fleet = model.fleet_size;
    av.horizon = horizon;
    av.vbar.assign(static_cast<std::size_t>(horizon) * nstates, 0.0);
    av.visits.assign(static_cast<std::size_t>(horizon - 1) * nstates, 0);
    av.scenario_hash = scenario.hash();
    for (int i = 0; i < nstates; ++i)
        av.at(horizon, i) = terminal_reward(space.state(i), model);

    std::vector<StepsizeState> stepsizes(static_cast<std::size_t>(horizon - 1) * nstates);
    std::vector<Demand> samples(config.tau2);

    Rng rng(config.seed);
    const State start = scenario.initial_state();
    const int start_index = space.index(start);

    for (std::uint64_t n = 1; n <= config.tau1; ++n) {
        State s = config.initial_state_rule == RLConfig::InitialStateRule::fixed_scenario
                      ? start
                      : space.state(rng.next_int(nstates));
        const double eps = epsilon_at(n, config.epsilon);

        for (int t = 1; t < horizon; ++t) {
            const int i = space.index(s);
            const double u = rng.next_double();

            Action a;
            double vhat;
            State next;
            if (u < eps) {
                const Demand d{scenario.schedule.sample(1, t, rng),
                               scenario.schedule.sample(2, t, rng)};
                a = actions[i][rng.next_int(static_cast<int>(actions[i].size()))];
                const TransitionOutcome out = next_state(s, a, d, model);
                vhat = realized_reward(s, a, out, model) + av.at(t + 1, space.index(out.next));
                next = out.next;
            } else {
                for (Demand& d : samples)
                    d = Demand{scenario.schedule.sample(1, t, rng),
                               scenario.schedule.sample(2, t, rng)};
                const auto [chosen, score] =
                    best_sampled_action(av, s, t, actions[i], samples, model, space);
                a = chosen;
                vhat = score;
                const Demand d{scenario.schedule.sample(1, t, rng),
                               scenario.schedule.sample(2, t, rng)};
                next = next_state(s, a, d, model).next;
            }

            const std::size_t flat = static_cast<std::size_t>(t - 1) * nstates + i;
            const double alpha =
                stepsize_next(stepsizes[flat], vhat, av.at(t, i), config.stepsize);
            av.at(t, i) = smooth_update(av.at(t, i), vhat, alpha);
            ++av.visits[flat];
            s = next;
        }

        if (n == 1 || n % config.trace_every == 0 || n == config.tau1)
            av.trace.emplace_back(n, av.at(1, start_index));
    }
    return av;
}

PolicyTable greedy_policy(const Scenario& scenario, ApproxValueTable& values,
                          const RLConfig& config, const SolveOptions& options) {
    const ModelConfig& model = scenario.model;
    const StateSpace space(model.fleet_size);
    const int nstates = space.size();

    PolicyTable policy{model.fleet_size, model.horizon,
                       std::vector<Action>(static_cast<std::size_t>(model.horizon - 1) * nstates),
                       values.scenario_hash, "rl"};

    const bool exact = model.fleet_size <= options.max_fleet_exact;
    values.extraction_method = exact ? "exact-expectation" : "tau2-sampling";
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);  // extraction stream, split from training

    for (int t = 1; t < model.horizon; ++t) {
        const auto& dist1 = scenario.schedule.dist(1, t);
        const auto& dist2 = scenario.schedule.dist(2, t);
        const auto next = std::span<const double>(values.vbar)
                              .subspan(static_cast<std::size_t>(t) * nstates, nstates);
        for (int i = 0; i < nstates; ++i) {
            const State s = space.state(i);
            if (exact) {
                Action best{};
                double best_q = 0.0;
                bool first = true;
                for (const Action a : feasible_actions(s, model)) {
                    const double q = action_value(s, a, dist1, dist2, model, next, space);
                    if (first || action_improves(q, a, best_q, best)) {
                        best = a;
                        best_q = q;
                        first = false;
                    }
                }
                policy.at(t, i) = best;
            } else {
                policy.at(t, i) =
                    select_action(values, s, t, scenario.schedule, model, config.tau2, rng)
                        .first;
            }
        }
    }
    return policy;
}

}  // namespace swapdp
