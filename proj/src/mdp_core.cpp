#include "swapdp/mdp_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swapdp {

bool action_feasible(State s, Action a, const ModelConfig& cfg) {
    if (s.s1 < 0 || s.s2 < 0 || s.s1 + s.s2 > cfg.fleet_size) return false;
    if (a.a01 < 0 || a.a02 < 0 || a.a12 < 0) return false;
    const int empties = cfg.fleet_size - s.s1 - s.s2;
    return a.a01 + a.a02 <= empties && a.a12 <= s.s1;
}

void require_feasible(State s, Action a, const ModelConfig& cfg) {
    require_valid_state(s, cfg);
    if (!action_feasible(s, a, cfg))
        throw validation_error("action (" + std::to_string(a.a01) + "," + std::to_string(a.a02) +
                               "," + std::to_string(a.a12) + ") infeasible for state (" +
                               std::to_string(s.s1) + "," + std::to_string(s.s2) + ")");
}

std::vector<Action> feasible_actions(State s, const ModelConfig& cfg) {
    require_valid_state(s, cfg);
    const int empties = cfg.fleet_size - s.s1 - s.s2;
    std::vector<Action> out;
    out.reserve(static_cast<std::size_t>((empties + 1) * (empties + 2) / 2) * (s.s1 + 1));
    for (int a01 = 0; a01 <= empties; ++a01)
        for (int a02 = 0; a02 <= empties - a01; ++a02)
            for (int a12 = 0; a12 <= s.s1; ++a12) out.push_back(Action{a01, a02, a12});
    return out;
}

IntermediateState intermediate_state(State s, Action a, Demand d, const ModelConfig& cfg) {
    require_feasible(s, a, cfg);
    if (d.d1 < 0 || d.d2 < 0) throw validation_error("demand counts must be >= 0");
    const int met_c1_lvl1 = std::min(s.s1 - a.a12, d.d1);
    const int met_c2_lvl2 = std::min(s.s2, d.d2);
    return IntermediateState{s.s1 + a.a01 - a.a12 - met_c1_lvl1,
                             s.s2 + a.a02 + a.a12 - met_c2_lvl2};
}

TransitionOutcome next_state(State s, Action a, Demand d, const ModelConfig& cfg) {
    TransitionOutcome out;
    out.intermediate = intermediate_state(s, a, d, cfg);
    out.met_c1_lvl1 = std::min(s.s1 - a.a12, d.d1);
    out.met_c2_lvl2 = std::min(s.s2, d.d2);

    // Leftover level-2 batteries absorb residual class-1 demand and land at
    // level 1 (one charge level spent on the shorter mission).
    const int residual_c1 = std::max(0, d.d1 - (s.s1 - a.a12));
    const int leftover_lvl2 = std::max(0, s.s2 - d.d2);
    out.met_c1_lvl2 = std::min(residual_c1, leftover_lvl2);

    out.next = State{out.intermediate.lvl1 + out.met_c1_lvl2,
                     out.intermediate.lvl2 - out.met_c1_lvl2};
    out.unmet_c1 = d.d1 - out.met_c1_lvl1 - out.met_c1_lvl2;
    out.unmet_c2 = d.d2 - out.met_c2_lvl2;
    return out;
}

double realized_reward(State s, Action a, const TransitionOutcome& outcome,
                       const ModelConfig& cfg) {
    // Each met-count equals the corresponding stock-difference form:
    // s1 + a01 - a12 - L1, L2 - j2 and s2 + a02 + a12 - L2.
    (void)s;
    (void)a;
    return cfg.rho11 * outcome.met_c1_lvl1 + cfg.rho21 * outcome.met_c1_lvl2 +
           cfg.rho22 * outcome.met_c2_lvl2;
}

double terminal_reward(State s, const ModelConfig& cfg) {
    require_valid_state(s, cfg);
    return cfg.rho11 * s.s1 + cfg.rho22 * s.s2;
}

std::map<State, double> transition_distribution(State s, Action a,
                                                const EpochDemandDistribution& dist1,
                                                const EpochDemandDistribution& dist2,
                                                const ModelConfig& cfg) {
    std::map<State, double> out;
    for_each_outcome(s, a, dist1, dist2, cfg,
                     [&](State j, double p, int, int, int) {
                         if (p > 0.0) out[j] += p;
                     });

    KahanSum total;
    for (const auto& [j, p] : out) total.add(p);
    if (std::abs(total.value() - 1.0) > 1e-8)
        throw std::logic_error("transition law mass " + format_double(total.value()) +
                               " drifted from 1");
    return out;
}

double expected_reward(State s, Action a, const EpochDemandDistribution& dist1,
                       const EpochDemandDistribution& dist2, const ModelConfig& cfg) {
    KahanSum acc;
    for_each_outcome(s, a, dist1, dist2, cfg,
                     [&](State, double p, int met11, int met21, int met22) {
                         acc.add(p * (cfg.rho11 * met11 + cfg.rho21 * met21 + cfg.rho22 * met22));
                     });
    return acc.value();
}

double action_value(State s, Action a, const EpochDemandDistribution& dist1,
                    const EpochDemandDistribution& dist2, const ModelConfig& cfg,
                    std::span<const double> next_values, const StateSpace& space) {
    KahanSum acc;
    for_each_outcome(s, a, dist1, dist2, cfg,
                     [&](State j, double p, int met11, int met21, int met22) {
                         acc.add(p * (cfg.rho11 * met11 + cfg.rho21 * met21 +
                                      cfg.rho22 * met22 + next_values[space.index(j)]));
                     });
    return acc.value();
}

}  // namespace swapdp
