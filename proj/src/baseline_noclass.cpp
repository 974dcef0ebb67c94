#include "swapdp/baseline_noclass.hpp"

#include <algorithm>

#include "swapdp/common.hpp"

namespace swapdp {

int flat_next_state(int charged, int recharge, int demand, int& served) {
    if (charged < 0 || recharge < 0 || demand < 0)
        throw validation_error("flat model: counts must be >= 0");
    served = std::min(charged, demand);
    return charged + recharge - served;
}

EpochDemandDistribution flat_demand(const Scenario& scenario, int t) {
    const double rate = scenario.schedule.rate(1, t) + scenario.schedule.rate(2, t);
    return EpochDemandDistribution::poisson(rate, scenario.truncation_eps);
}

FlatSolution flat_backward_induction(const Scenario& scenario) {
    scenario.model.validate();
    const int m = scenario.model.fleet_size;
    const int horizon = scenario.model.horizon;
    const std::uint64_t hash = scenario.hash();

    FlatSolution sol;
    sol.value = FlatValueTable{m, horizon,
                               std::vector<double>(static_cast<std::size_t>(horizon) * (m + 1)),
                               hash};
    sol.policy =
        FlatPolicyTable{m, horizon,
                        std::vector<int>(static_cast<std::size_t>(horizon - 1) * (m + 1)), hash};

    for (int s = 0; s <= m; ++s) sol.value.at(horizon, s) = s;

    for (int t = horizon - 1; t >= 1; --t) {
        const EpochDemandDistribution dist = flat_demand(scenario, t);
        for (int s = 0; s <= m; ++s) {
            int best_a = 0;
            double best_q = 0.0;
            bool first = true;
            for (int a = 0; a <= m - s; ++a) {
                // served = d for d < s (landing at s+a-d), else s (landing at a).
                KahanSum q;
                const int last = std::min(s - 1, dist.d_max());
                for (int d = 0; d <= last; ++d)
                    q.add(dist.pmf(d) * (d + sol.value.at(t + 1, s + a - d)));
                q.add(dist.tail_or_zero(s) * (s + sol.value.at(t + 1, a)));
                // Equal values prefer more recharging, mirroring the classified
                // solver's bias toward fully charged stock.
                if (first || q.value() > best_q || (q.value() == best_q && a > best_a)) {
                    best_a = a;
                    best_q = q.value();
                    first = false;
                }
            }
            sol.policy.at(t, s) = best_a;
            sol.value.at(t, s) = best_q;
        }
    }
    return sol;
}

}  // namespace swapdp
