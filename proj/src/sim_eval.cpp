#include "swapdp/sim_eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "swapdp/mdp_core.hpp"
#include "swapdp/rng.hpp"
#include "swapdp/solver_rl.hpp"

namespace swapdp {

double pct_met_demand(long met, long realized) {
    if (met < 0 || realized < 0 || met > realized)
        throw validation_error("met/realized totals out of range");
    if (realized == 0) return 100.0;
    return 100.0 * static_cast<double>(met) / static_cast<double>(realized);
}

double optimality_gap(double exact_value, double approx_value) {
    if (!(exact_value > 0.0)) throw validation_error("exact value must be positive");
    return 100.0 * std::abs(exact_value - approx_value) / exact_value;
}

namespace {

void finalize(PathStats& p) {
    p.met_pct_total =
        pct_met_demand(p.met_c1_lvl1 + p.met_c1_lvl2 + p.met_c2, p.realized_c1 + p.realized_c2);
    p.met_pct_c1 = pct_met_demand(p.met_c1_lvl1 + p.met_c1_lvl2, p.realized_c1);
    p.met_pct_c2 = pct_met_demand(p.met_c2, p.realized_c2);
    // By-level split of class-1 service; 0/0 paths report 0 so the columns
    // stay additive only where demand existed.
    p.met_c1_lvl1_pct =
        p.realized_c1 > 0 ? 100.0 * static_cast<double>(p.met_c1_lvl1) / p.realized_c1 : 0.0;
    p.met_c1_lvl2_pct =
        p.realized_c1 > 0 ? 100.0 * static_cast<double>(p.met_c1_lvl2) / p.realized_c1 : 0.0;
}

PathStats run_path(const Scenario& scenario, const PolicySpec& policy, std::uint64_t seed,
                   long path_index, std::vector<StepRecord>* steps) {
    const ModelConfig& model = scenario.model;
    const StateSpace space(model.fleet_size);
    Rng rng = Rng::for_path(seed, static_cast<std::uint64_t>(path_index));

    PathStats stats;
    const State start = scenario.initial_state();

    if (policy.kind == PolicySpec::Kind::flat_table) {
        int charged = start.s1 + start.s2;
        for (int t = 1; t < model.horizon; ++t) {
            const Demand d{scenario.schedule.sample(1, t, rng),
                           scenario.schedule.sample(2, t, rng)};
            const int recharge = policy.flat->at(t, charged);
            int served = 0;
            const int next = flat_next_state(charged, recharge, d.d1 + d.d2, served);
            // Attribute service class-1 first; flat batteries count as full.
            const int served_c1 = std::min(d.d1, served);
            const int served_c2 = served - served_c1;
            stats.realized_c1 += d.d1;
            stats.realized_c2 += d.d2;
            stats.met_c1_lvl2 += served_c1;
            stats.met_c2 += served_c2;
            stats.a02 += recharge;
            stats.reward += served;
            if (steps)
                steps->push_back(StepRecord{t, State{0, charged}, Action{0, recharge, 0}, d, 0,
                                            served_c1, served_c2, static_cast<double>(served)});
            charged = next;
        }
        stats.reward += charged;  // terminal: 1 per full battery
        if (steps)
            steps->push_back(StepRecord{model.horizon, State{0, charged}, Action{}, Demand{}, 0,
                                        0, 0, static_cast<double>(charged)});
        finalize(stats);
        return stats;
    }

    State s = start;
    for (int t = 1; t < model.horizon; ++t) {
        const Demand d{scenario.schedule.sample(1, t, rng),
                       scenario.schedule.sample(2, t, rng)};
        Action a;
        switch (policy.kind) {
            case PolicySpec::Kind::table:
                a = policy.table->at(t, space.index(s));
                break;
            case PolicySpec::Kind::benchmark:
                a = benchmark_action(s, model);
                break;
            default:
                throw validation_error("unsupported policy source");
        }
        const TransitionOutcome out = next_state(s, a, d, model);
        const double reward = realized_reward(s, a, out, model);

        stats.realized_c1 += d.d1;
        stats.realized_c2 += d.d2;
        stats.met_c1_lvl1 += out.met_c1_lvl1;
        stats.met_c1_lvl2 += out.met_c1_lvl2;
        stats.met_c2 += out.met_c2_lvl2;
        stats.a01 += a.a01;
        stats.a02 += a.a02;
        stats.a12 += a.a12;
        stats.reward += reward;
        if (steps)
            steps->push_back(StepRecord{t, s, a, d, out.met_c1_lvl1, out.met_c1_lvl2,
                                        out.met_c2_lvl2, reward});
        s = out.next;
    }
    const double terminal = terminal_reward(s, model);
    stats.reward += terminal;
    if (steps)
        steps->push_back(StepRecord{model.horizon, s, Action{}, Demand{}, 0, 0, 0, terminal});
    finalize(stats);
    return stats;
}

void validate_policy_spec(const Scenario& scenario, const PolicySpec& policy) {
    const int m = scenario.model.fleet_size;
    switch (policy.kind) {
        case PolicySpec::Kind::table:
            if (!policy.table) throw validation_error("policy table missing");
            if (policy.table->fleet != m || policy.table->horizon != scenario.model.horizon)
                throw validation_error("policy table dimensions do not match the scenario");
            break;
        case PolicySpec::Kind::flat_table:
            if (!policy.flat) throw validation_error("flat policy table missing");
            if (policy.flat->fleet != m || policy.flat->horizon != scenario.model.horizon)
                throw validation_error("flat policy table dimensions do not match the scenario");
            break;
        case PolicySpec::Kind::benchmark:
            break;
    }
}

MetricsSummary reduce(const std::vector<PathStats>& paths, std::uint64_t seed) {
    MetricsSummary m;
    m.n_paths = static_cast<long>(paths.size());
    m.seed = seed;
    KahanSum total, c1, c2, l1, l2, a01, a02, a12, reward;
    for (const PathStats& p : paths) {
        total.add(p.met_pct_total);
        c1.add(p.met_pct_c1);
        c2.add(p.met_pct_c2);
        l1.add(p.met_c1_lvl1_pct);
        l2.add(p.met_c1_lvl2_pct);
        a01.add(static_cast<double>(p.a01));
        a02.add(static_cast<double>(p.a02));
        a12.add(static_cast<double>(p.a12));
        reward.add(p.reward);
    }
    const double n = static_cast<double>(paths.size());
    m.avg_met_pct_total = total.value() / n;
    m.avg_met_pct_c1 = c1.value() / n;
    m.avg_met_pct_c2 = c2.value() / n;
    m.avg_met_c1_lvl1_pct = l1.value() / n;
    m.avg_met_c1_lvl2_pct = l2.value() / n;
    m.avg_a01 = a01.value() / n;
    m.avg_a02 = a02.value() / n;
    m.avg_a12 = a12.value() / n;
    m.mean_reward = reward.value() / n;
    return m;
}

SimulationResult simulate_impl(const Scenario& scenario, const PolicySpec& policy, long n_paths,
                               std::uint64_t seed, const SimOptions& options, bool parallel) {
    scenario.model.validate();
    validate_policy_spec(scenario, policy);
    if (n_paths < 1) throw validation_error("n_paths must be >= 1");

    const bool record = options.record_steps;
    std::vector<PathStats> paths(n_paths);
    std::vector<std::vector<StepRecord>> steps(record ? n_paths : 0);

    if (parallel) {
        const int threads = resolve_threads(options.threads);
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long p = 0; p < n_paths; ++p)
            paths[p] = run_path(scenario, policy, seed, p, record ? &steps[p] : nullptr);
    } else {
        for (long p = 0; p < n_paths; ++p)
            paths[p] = run_path(scenario, policy, seed, p, record ? &steps[p] : nullptr);
    }

    SimulationResult result;
    result.summary = reduce(paths, seed);
    if (options.keep_paths || record) result.paths = std::move(paths);
    if (record) result.steps = std::move(steps);
    return result;
}

}  // namespace

SimulationResult simulate_paths(const Scenario& scenario, const PolicySpec& policy, long n_paths,
                                std::uint64_t seed, const SimOptions& options) {
    return simulate_impl(scenario, policy, n_paths, seed, options, true);
}

SimulationResult simulate_paths_serial(const Scenario& scenario, const PolicySpec& policy,
                                       long n_paths, std::uint64_t seed,
                                       const SimOptions& options) {
    return simulate_impl(scenario, policy, n_paths, seed, options, false);
}

std::array<double, 3> avg_actions(const std::vector<PathStats>& paths) {
    if (paths.empty()) throw validation_error("avg_actions needs at least one path");
    KahanSum a01, a02, a12;
    for (const PathStats& p : paths) {
        a01.add(static_cast<double>(p.a01));
        a02.add(static_cast<double>(p.a02));
        a12.add(static_cast<double>(p.a12));
    }
    const double n = static_cast<double>(paths.size());
    return {a01.value() / n, a02.value() / n, a12.value() / n};
}

std::vector<SweepRow> sweep(const Scenario& scenario, SweepParam param,
                            const std::vector<double>& values, SweepSolver solver, long n_paths,
                            std::uint64_t seed, const SimOptions& options,
                            const RLConfig* rl_config, const SolveOptions& solve_options) {
    if (values.empty()) throw validation_error("sweep needs at least one parameter value");

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const double v : values) {
        Scenario point = scenario;
        if (param == SweepParam::fleet_size) {
            if (v < 0 || v != std::floor(v))
                throw validation_error("fleet_size sweep values must be nonnegative integers");
            point.model.fleet_size = static_cast<int>(v);
            if (!point.initial_all_level2) require_valid_state(point.initial_explicit, point.model);
        } else {
            if (v < 0) throw validation_error("rho21 sweep values must be >= 0");
            point.model.rho21 = v;
        }

        SimOptions sim_options = options;
        sim_options.keep_paths = true;

        SweepRow row;
        row.param_value = v;
        SimulationResult res;
        switch (solver) {
            case SweepSolver::bi: {
                const ExactSolution sol = backward_induction(point, solve_options);
                res = simulate_paths(point, PolicySpec::of(sol.policy), n_paths, seed,
                                     sim_options);
                break;
            }
            case SweepSolver::rl: {
                RLConfig cfg = rl_config ? *rl_config : RLConfig{};
                ApproxValueTable av = train(point, cfg);
                const PolicyTable pol = greedy_policy(point, av, cfg, solve_options);
                res = simulate_paths(point, PolicySpec::of(pol), n_paths, seed, sim_options);
                break;
            }
            case SweepSolver::benchmark:
                res = simulate_paths(point, PolicySpec::benchmark(), n_paths, seed, sim_options);
                break;
            case SweepSolver::flat: {
                const FlatSolution sol = flat_backward_induction(point);
                res = simulate_paths(point, PolicySpec::of(sol.policy), n_paths, seed,
                                     sim_options);
                break;
            }
        }
        row.summary = res.summary;
        row.paths = std::move(res.paths);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string metrics_csv(const std::vector<SweepRow>& rows, const std::string& solver) {
    std::string out =
        "param,solver,n_paths,seed,avg_met_pct,avg_met_pct_c1,avg_met_pct_c2,"
        "met_c1_lvl1_pct,met_c1_lvl2_pct,avg_a01,avg_a02,avg_a12,mean_reward\n";
    for (const SweepRow& r : rows) {
        const MetricsSummary& m = r.summary;
        out += format_double(r.param_value) + ',' + solver + ',' + std::to_string(m.n_paths) +
               ',' + std::to_string(m.seed) + ',' + format_double(m.avg_met_pct_total) + ',' +
               format_double(m.avg_met_pct_c1) + ',' + format_double(m.avg_met_pct_c2) + ',' +
               format_double(m.avg_met_c1_lvl1_pct) + ',' + format_double(m.avg_met_c1_lvl2_pct) +
               ',' + format_double(m.avg_a01) + ',' + format_double(m.avg_a02) + ',' +
               format_double(m.avg_a12) + ',' + format_double(m.mean_reward) + '\n';
    }
    return out;
}

std::string path_dump_csv(const SimulationResult& result, const Scenario& scenario) {
    (void)scenario;
    std::string out = "path,t,s1,s2,a01,a02,a12,d1,d2,met_c1_l1,met_c1_l2,met_c2,reward\n";
    for (std::size_t p = 0; p < result.steps.size(); ++p) {
        for (const StepRecord& r : result.steps[p]) {
            out += std::to_string(p) + ',' + std::to_string(r.t) + ',' +
                   std::to_string(r.s.s1) + ',' + std::to_string(r.s.s2) + ',' +
                   std::to_string(r.a.a01) + ',' + std::to_string(r.a.a02) + ',' +
                   std::to_string(r.a.a12) + ',' + std::to_string(r.d.d1) + ',' +
                   std::to_string(r.d.d2) + ',' + std::to_string(r.met_c1_lvl1) + ',' +
                   std::to_string(r.met_c1_lvl2) + ',' + std::to_string(r.met_c2) + ',' +
                   format_double(r.reward) + '\n';
        }
    }
    return out;
}

}  // namespace swapdp
