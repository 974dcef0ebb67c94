#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "swapdp/common.hpp"

namespace swapdp {

/**
 * Station model parameters: fleet size, decision horizon, and reward weights.
 *
 * The horizon counts epochs 1..N where decisions are taken at t = 1..N-1 and
 * t = N only collects the terminal reward. rho<level><class> is the reward for
 * meeting one class-<class> request with a level-<level> battery; rho21 prices
 * the use of a fully charged battery on a short mission.
 */
struct ModelConfig {
    int fleet_size = 0;  // M
    int horizon = 2;     // N
    double rho11 = 1.0;
    double rho21 = 0.5;
    double rho22 = 1.0;
    int num_classes = 2;

    void validate() const {
        if (fleet_size < 0) throw validation_error("model: fleet_size must be >= 0");
        if (horizon < 2) throw validation_error("model: horizon must be >= 2");
        if (rho11 < 0 || rho21 < 0 || rho22 < 0)
            throw validation_error("model: reward weights must be >= 0");
        if (num_classes != 2)
            throw validation_error("model: only two demand classes are supported");
    }
};

/// Battery counts at charge levels 1 and 2; level 0 holds the remaining M - s1 - s2.
struct State {
    int s1 = 0;
    int s2 = 0;

    friend auto operator<=>(const State&, const State&) = default;
};

/// Recharge counts by move: level 0->1, 0->2 and 1->2.
struct Action {
    int a01 = 0;
    int a02 = 0;
    int a12 = 0;

    friend auto operator<=>(const Action&, const Action&) = default;
};

/// Realized request counts per demand class for one epoch.
struct Demand {
    int d1 = 0;
    int d2 = 0;

    friend auto operator<=>(const Demand&, const Demand&) = default;
};

/// Battery counts at levels 1 and 2 after same-level service, before spillover.
struct IntermediateState {
    int lvl1 = 0;
    int lvl2 = 0;

    friend auto operator<=>(const IntermediateState&, const IntermediateState&) = default;
};

/**
 * Full accounting of one realized transition: the landing state plus how each
 * unit of demand was met (or dropped; unmet demand does not carry over).
 */
struct TransitionOutcome {
    State next;
    IntermediateState intermediate;
    int met_c1_lvl1 = 0;  // class 1 served by level-1 batteries
    int met_c1_lvl2 = 0;  // class 1 served by leftover level-2 batteries
    int met_c2_lvl2 = 0;  // class 2 served by level-2 batteries
    int unmet_c1 = 0;
    int unmet_c2 = 0;
};

/**
 * Dense triangular indexing of the simplex {(s1, s2) : s1 + s2 <= M}.
 *
 * States are ordered row-major by s1 then s2, which fixes the canonical
 * iteration order used by solvers and serializers.
 */
class StateSpace {
public:
    explicit StateSpace(int fleet) : fleet_(fleet) {
        row_offset_.reserve(fleet + 2);
        int off = 0;
        for (int s1 = 0; s1 <= fleet; ++s1) {
            row_offset_.push_back(off);
            off += fleet - s1 + 1;
        }
        row_offset_.push_back(off);
    }

    int fleet() const { return fleet_; }
    int size() const { return row_offset_.back(); }

    bool contains(State s) const {
        return s.s1 >= 0 && s.s2 >= 0 && s.s1 + s.s2 <= fleet_;
    }

    int index(State s) const { return row_offset_[s.s1] + s.s2; }

    State state(int index) const {
        int s1 = 0;
        while (row_offset_[s1 + 1] <= index) ++s1;
        return State{s1, index - row_offset_[s1]};
    }

private:
    int fleet_;
    std::vector<int> row_offset_;
};

inline void require_valid_state(State s, const ModelConfig& cfg) {
    if (s.s1 < 0 || s.s2 < 0 || s.s1 + s.s2 > cfg.fleet_size)
        throw validation_error("state (" + std::to_string(s.s1) + "," + std::to_string(s.s2) +
                               ") is outside the fleet simplex for M=" +
                               std::to_string(cfg.fleet_size));
}

}  // namespace swapdp
